//! Randomized invariants, checked against oracles that share no code with
//! the library's own checkers.

use std::sync::Arc;

use jobmatch::generate::{generate, mixed_market, random_utility, rng, GeneratorKind};
use jobmatch::model::{file, Firm, FirmId, Market, Matching, Outcome, Profile, SetFunction};
use jobmatch::setfn::is_gross_substitutes;
use jobmatch::stability::{find_block, find_weak_block};
use jobmatch::surplus::SurplusSolver;
use jobmatch::vcg::{check_sir, vcg};
use jobmatch::{Rational, Subset};
use proptest::prelude::*;

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// A weakly increasing integer table grown from non-negative increments:
/// `v(S) = max_{i∈S} v(S−i) + inc(S)`.
fn monotone_table(n: usize, inc: &[i64]) -> Vec<i64> {
    let mut v = vec![0i64; 1 << n];
    for s in 1..1usize << n {
        let below = (0..n).filter(|i| s & (1 << i) != 0).map(|i| v[s & !(1 << i)]).max().unwrap();
        v[s] = below + inc[s];
    }
    v
}

fn set_function(n: usize, table: &[i64]) -> SetFunction {
    let workers: Arc<[String]> = names("w", n).into();
    SetFunction::from_table(workers, table.iter().map(|&x| Rational::from_integer(x)).collect()).unwrap()
}

fn table_strategy(max_n: usize, max_inc: i64) -> impl Strategy<Value = (usize, Vec<i64>)> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(0..=max_inc, 1 << n).prop_map(move |inc| (n, monotone_table(n, &inc)))
    })
}

/// Local characterization of gross substitutes for weakly increasing
/// functions: for every `S` and distinct `i, j, k` outside it,
/// `h(S+ij) + h(S) ≤ h(S+i) + h(S+j)` and
/// `h(S+ij) + h(S+k) ≤ max(h(S+ik) + h(S+j), h(S+jk) + h(S+i))`.
fn local_gs(n: usize, h: &[i64]) -> bool {
    let bit = |i: usize| 1usize << i;
    for s in 0..1usize << n {
        let out: Vec<usize> = (0..n).filter(|&i| s & bit(i) == 0).collect();
        for &i in &out {
            for &j in &out {
                if i == j {
                    continue;
                }
                if h[s | bit(i) | bit(j)] + h[s] > h[s | bit(i)] + h[s | bit(j)] {
                    return false;
                }
                for &k in &out {
                    if k == i || k == j {
                        continue;
                    }
                    let lhs = h[s | bit(i) | bit(j)] + h[s | bit(k)];
                    let a = h[s | bit(i) | bit(k)] + h[s | bit(j)];
                    let b = h[s | bit(j) | bit(k)] + h[s | bit(i)];
                    if lhs > a.max(b) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn gross_substitutes_matches_local_characterization_exhaustively() {
    // every weakly increasing table on three workers with values in 0..=3
    let mut counts = [0usize; 2];
    let mut v = [0i64; 8];
    fn fill(v: &mut [i64; 8], s: usize, counts: &mut [usize; 2]) {
        if s == 8 {
            let h = set_function(3, v);
            let gs = is_gross_substitutes(&h).unwrap().verdict;
            assert_eq!(gs, local_gs(3, v), "table {v:?}");
            counts[gs as usize] += 1;
            return;
        }
        let lo = (0..3).filter(|i| s & (1 << i) != 0).map(|i| v[s & !(1 << i)]).max().unwrap();
        for x in lo..=3 {
            v[s] = x;
            fill(v, s + 1, counts);
        }
    }
    fill(&mut v, 1, &mut counts);
    assert!(counts[0] > 0 && counts[1] > 0, "{counts:?}");
}

fn generated_utility() -> impl Strategy<Value = SetFunction> {
    (0..GeneratorKind::ALL.len(), 2usize..=5, any::<u64>()).prop_map(|(k, n, seed)| {
        let workers: Arc<[String]> = names("w", n).into();
        random_utility(GeneratorKind::ALL[k], &workers, &mut rng(seed)).unwrap()
    })
}

fn local_gs_rational(h: &SetFunction) -> bool {
    // scale to integers by the common denominator of the table
    let den = h.values().iter().fold(1i64, |acc, v| {
        let d: i64 = v.to_string().split('/').nth(1).map_or(1, |d| d.parse().unwrap());
        num_lcm(acc, d)
    });
    let ints: Vec<i64> = h
        .values()
        .iter()
        .map(|v| {
            let x = v * &Rational::from_integer(den);
            assert!(x.is_integer());
            x.to_string().parse().unwrap()
        })
        .collect();
    local_gs(h.n(), &ints)
}

fn num_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// An integer market together with an arbitrary integer outcome.
#[derive(Clone, Debug)]
struct Scenario {
    n: usize,
    m: usize,
    utilities: Vec<Vec<i64>>,
    disutility: Vec<Vec<i64>>,
    assignment: Vec<Option<usize>>,
    salaries: Vec<i64>,
}

impl Scenario {
    fn market(&self) -> Market {
        let firms = self
            .utilities
            .iter()
            .enumerate()
            .map(|(f, t)| Firm {
                name: format!("f{}", f + 1),
                utility: set_function(self.n, t),
            })
            .collect();
        Market::new(names("w", self.n), firms, self.profile()).unwrap()
    }

    fn profile(&self) -> Profile {
        Profile::new(
            self.disutility
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn outcome(&self) -> Outcome {
        let mu = Matching::from_assignment(self.assignment.iter().map(|a| a.map(FirmId)).collect());
        Outcome::new(mu, self.salaries.iter().map(|&p| Rational::from_integer(p)).collect()).unwrap()
    }

    fn firm_payoff(&self, f: usize) -> i64 {
        let mask = (0..self.n).filter(|&w| self.assignment[w] == Some(f)).fold(0usize, |s, w| s | 1 << w);
        let paid: i64 = (0..self.n).filter(|&w| self.assignment[w] == Some(f)).map(|w| self.salaries[w]).sum();
        self.utilities[f][mask] - paid
    }

    fn worker_payoff(&self, w: usize) -> i64 {
        match self.assignment[w] {
            Some(f) => self.salaries[w] - self.disutility[w][f],
            None => 0,
        }
    }

    /// Searches payments on a half-unit grid for a split of `u_f(S)` that
    /// leaves everyone in `S ∪ {f}` no worse off and someone better off.
    /// Values are doubled so the grid is integral.
    fn grid_blocks(&self, f: usize, s: usize) -> bool {
        let members: Vec<usize> = (0..self.n).filter(|&w| s & (1 << w) != 0).collect();
        let budget = 2 * (self.utilities[f][s] - self.firm_payoff(f));
        if budget < 0 {
            return false;
        }
        let need: Vec<i64> = members
            .iter()
            .map(|&w| 2 * (self.worker_payoff(w) + self.disutility[w][f]))
            .collect();
        fn go(need: &[i64], i: usize, left: i64, strict: bool) -> bool {
            if i == need.len() {
                return strict || left > 0;
            }
            (0..=left).any(|p| p >= need[i] && go(need, i + 1, left - p, strict || p > need[i]))
        }
        go(&need, 0, budget, false)
    }
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (1usize..=3, 1usize..=2)
        .prop_flat_map(|(n, m)| {
            (
                Just((n, m)),
                prop::collection::vec(prop::collection::vec(0i64..=2, 1 << n), m),
                prop::collection::vec(prop::collection::vec(0i64..=3, m), n),
                prop::collection::vec(prop::option::of(0..m), n),
                prop::collection::vec(-2i64..=4, n),
            )
        })
        .prop_map(|((n, m), incs, disutility, assignment, raw)| {
            let salaries = assignment.iter().zip(raw).map(|(a, p)| if a.is_some() { p } else { 0 }).collect();
            Scenario {
                n,
                m,
                utilities: incs.iter().map(|inc| monotone_table(n, inc)).collect(),
                disutility,
                assignment,
                salaries,
            }
        })
}

fn gs_market() -> impl Strategy<Value = Market> {
    (
        prop::sample::select(vec![GeneratorKind::Additive, GeneratorKind::UnitDemand]),
        2usize..=6,
        1usize..=3,
        any::<u64>(),
    )
        .prop_map(|(kind, n, m, seed)| generate(kind, n, m, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gross_substitutes_matches_local_characterization((n, t) in table_strategy(4, 3)) {
        let h = set_function(n, &t);
        prop_assert_eq!(is_gross_substitutes(&h).unwrap().verdict, local_gs(n, &t));
    }

    #[test]
    fn gross_substitutes_on_generated_utilities(h in generated_utility()) {
        prop_assert_eq!(is_gross_substitutes(&h).unwrap().verdict, local_gs_rational(&h));
    }

    #[test]
    fn blocking_matches_payment_grid_search(sc in scenario()) {
        let (m, u, o) = (sc.market(), sc.profile(), sc.outcome());
        let expected = (0..sc.m).flat_map(|f| (0..1usize << sc.n).map(move |s| (f, s))).find(|&(f, s)| sc.grid_blocks(f, s));
        let found = find_block(&m, &u, &o);
        prop_assert_eq!(found.as_ref().map(|b| (b.firm.0, b.coalition.index())), expected);
        if let Some(b) = found {
            prop_assert!(b.verify(&m, &u, &o));
            prop_assert!(b.payments.iter().all(|(_, p)| !p.is_negative()));
        }
    }

    #[test]
    fn weak_blocks_are_admissible_blocks(sc in scenario()) {
        let (m, u, o) = (sc.market(), sc.profile(), sc.outcome());
        if let Some(b) = find_weak_block(&m, &u, &o) {
            let allowed = o.matching().workers_of(b.firm).union(o.matching().unmatched_workers());
            prop_assert!(b.coalition.is_subset_of(allowed));
            prop_assert!(b.verify(&m, &u, &o));
            prop_assert!(find_block(&m, &u, &o).is_some());
        }
    }

    #[test]
    fn vcg_payments_and_payoffs(seed in any::<u64>()) {
        let m = mixed_market(6, 3, seed).unwrap();
        let r = vcg(&m, m.disutilities()).unwrap();
        for w in 0..m.n() {
            prop_assert!(!r.salaries()[w].is_negative());
            prop_assert_eq!(&r.worker_payoffs[w], &(&r.v_total - &r.v_excluding[w]));
            if r.matching().firm_of(w).is_none() {
                prop_assert!(r.salaries()[w].is_zero());
                prop_assert!(r.worker_payoffs[w].is_zero());
            }
        }
    }

    #[test]
    fn fully_employed_sir_outcomes_admit_no_weak_block(seed in any::<u64>()) {
        let m = mixed_market(6, 3, seed).unwrap();
        let r = vcg(&m, m.disutilities()).unwrap();
        if r.matching().unmatched_workers().is_empty() && check_sir(&r, &m).verdict {
            prop_assert_eq!(find_weak_block(&m, m.disutilities(), &r.outcome), None);
        }
    }

    #[test]
    fn gross_substitutes_firms_give_stable_vcg_outcomes(m in gs_market()) {
        let r = vcg(&m, m.disutilities()).unwrap();
        prop_assert_eq!(find_block(&m, m.disutilities(), &r.outcome), None);
    }

    #[test]
    fn surplus_is_invariant_under_relabelling(seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let m = mixed_market(7, 3, seed).unwrap();
        let mut perm: Vec<usize> = (0..m.n()).collect();
        perm.shuffle(&mut rng(shuffle));
        let p = m.permute_workers(&perm).unwrap();
        let a = SurplusSolver::new(&m, m.disutilities()).unwrap();
        let b = SurplusSolver::new(&p, p.disutilities()).unwrap();
        prop_assert_eq!(a.total(), b.total());
        for (w, &to) in perm.iter().enumerate() {
            prop_assert_eq!(a.excluding(Subset::singleton(w)), b.excluding(Subset::singleton(to)));
        }
    }

    #[test]
    fn market_files_round_trip(seed in any::<u64>()) {
        let m = mixed_market(8, 4, seed).unwrap();
        let text = file::write_market(&m);
        let back = file::read_market(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(file::write_market(&back), text);
    }
}
