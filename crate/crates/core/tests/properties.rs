use equibound::bounds::zero_set_lower_bound;
use equibound::constructions::{build_prop63, plan_theorem13, validate_certificate, Certificate};
use equibound::cyclic_ring::{
    binomial_one_minus_z, cyclic_mul, is_zero_in_quotient, CyclicPoly, Locality, QuotientCache,
};
use equibound::euler::{euler_class, euler_class_twisted, lemma41_nonvanishing_in, EulerQuery};
use equibound::group_rep::{delta, effective_reduction, GroupSpec, RepSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

const GROUPS: [(u64, i64); 8] = [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2), (5, 0), (5, 1)];

fn group_strategy() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(GROUPS.to_vec()).prop_map(|(p, k)| GroupSpec::new(p, k).unwrap())
}

fn rep_strategy() -> impl Strategy<Value = RepSpec> {
    group_strategy().prop_flat_map(|g| {
        let n = g.order() as i64;
        prop::collection::vec(1..n, 1..7).prop_map(move |e| RepSpec::new(g, &e).unwrap())
    })
}

fn poly_strategy(g: GroupSpec) -> impl Strategy<Value = CyclicPoly> {
    prop::collection::vec(-50i64..50, g.order()).prop_map(move |c| CyclicPoly::from_poly(g, c))
}

fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|u| u.gcd(&n) == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_counts_every_summand(rep in rep_strategy()) {
        prop_assert_eq!(rep.profile().iter().sum::<usize>(), rep.dim());
    }

    #[test]
    fn delta_dominates_dimension(rep in rep_strategy()) {
        if let Ok(d) = delta(&rep) {
            let m = rep.dim();
            prop_assert!(d >= m as i64);
            if d == m as i64 {
                let k = rep.group().k() as usize;
                let prof = rep.profile();
                prop_assert!(k == 0 || (prof[0] == m - 1 && prof[k] == 1));
            }
        }
    }

    #[test]
    fn reduction_is_idempotent(rep in rep_strategy()) {
        let once = effective_reduction(&rep);
        let twice = effective_reduction(&once.rep);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.delta, delta(&once.rep).unwrap());
    }

    #[test]
    fn profile_ignores_unit_multiples(rep in rep_strategy(), pick in any::<prop::sample::Index>()) {
        let n = rep.group().order() as u64;
        let us = units(n);
        let u = us[pick.index(us.len())];
        let scaled: Vec<i64> = rep.exponents().iter().map(|&t| ((t * u) % n) as i64).collect();
        let other = RepSpec::new(rep.group(), &scaled).unwrap();
        prop_assert_eq!(rep.profile(), other.profile());
    }

    #[test]
    fn ring_laws((a, b, c) in group_strategy().prop_flat_map(|g| (poly_strategy(g), poly_strategy(g), poly_strategy(g)))) {
        let ab = cyclic_mul(&a, &b).unwrap();
        prop_assert_eq!(&ab, &cyclic_mul(&b, &a).unwrap());
        prop_assert_eq!(cyclic_mul(&ab, &c).unwrap(), cyclic_mul(&a, &cyclic_mul(&b, &c).unwrap()).unwrap());
        let left = cyclic_mul(&a, &b.add(&c).unwrap()).unwrap();
        let right = ab.add(&cyclic_mul(&a, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn binomial_powers_add(g in group_strategy(), a in 0i64..=40, b in 0i64..=40) {
        let lhs = cyclic_mul(&binomial_one_minus_z(g, a).unwrap(), &binomial_one_minus_z(g, b).unwrap()).unwrap();
        prop_assert_eq!(lhs, binomial_one_minus_z(g, a + b).unwrap());
    }

    #[test]
    fn membership_is_a_subgroup(
        g in group_strategy(),
        n in 1i64..12,
        c1 in prop::collection::vec(-3i64..4, 27),
        c2 in prop::collection::vec(-3i64..4, 27),
        x in prop::collection::vec(-20i64..20, 27),
    ) {
        let cache = QuotientCache::new();
        let ctx = cache.get(g, n).unwrap();
        let base = binomial_one_minus_z(g, n).unwrap();
        // random lattice members: polynomial multiples of (1 - z)^n
        let mk = |c: &[i64]| cyclic_mul(&CyclicPoly::from_poly(g, c[..g.order()].to_vec()), &base).unwrap();
        let (m1, m2) = (mk(&c1), mk(&c2));
        for loc in [Locality::Integral, Locality::PLocal] {
            prop_assert!(is_zero_in_quotient(&m1, &ctx, loc).unwrap());
            prop_assert!(is_zero_in_quotient(&m1.add(&m2).unwrap(), &ctx, loc).unwrap());
            prop_assert!(is_zero_in_quotient(&m1.sub(&m2).unwrap(), &ctx, loc).unwrap());
        }
        // members have vanishing augmentation; integral zero implies p-local zero
        prop_assert!(m1.coefficient_sum().is_zero());
        let y = CyclicPoly::from_poly(g, x[..g.order()].to_vec());
        if is_zero_in_quotient(&y, &ctx, Locality::Integral).unwrap() {
            prop_assert!(is_zero_in_quotient(&y, &ctx, Locality::PLocal).unwrap());
            prop_assert!(y.coefficient_sum().is_zero());
        }
    }

    #[test]
    fn euler_class_is_multiplicative(a in rep_strategy(), extra in prop::collection::vec(1i64..1000, 1..4)) {
        let b = RepSpec::new(a.group(), &extra.iter().map(|&t| {
            let n = a.group().order() as i64;
            1 + t % (n - 1)
        }).collect::<Vec<_>>()).unwrap();
        let ab = a.direct_sum(&b).unwrap();
        prop_assert_eq!(euler_class(&ab), cyclic_mul(&euler_class(&a), &euler_class(&b)).unwrap());
    }

    #[test]
    fn twisted_class_has_zero_augmentation(rep in rep_strategy(), j in 0u32..5) {
        prop_assert!(euler_class_twisted(&rep, j).coefficient_sum().is_zero());
    }

    #[test]
    fn lower_bound_is_even_and_nonnegative(rep in rep_strategy(), n in 1i64..80) {
        if let Ok(Some(b)) = zero_set_lower_bound(&rep, n) {
            prop_assert!(b >= 0 && b % 2 == 0);
        }
    }
}

#[test]
fn generators_are_zero_in_both_modes() {
    for (p, k) in GROUPS {
        let g = GroupSpec::new(p, k).unwrap();
        for n in [1, 2, 5, g.order() as i64 + 3] {
            let cache = QuotientCache::new();
            let ctx = cache.get(g, n).unwrap();
            for i in 0..g.order() {
                let col = CyclicPoly::from_poly(g, ctx.generators().column(i));
                assert!(is_zero_in_quotient(&col, &ctx, Locality::Integral).unwrap());
                assert!(is_zero_in_quotient(&col, &ctx, Locality::PLocal).unwrap());
            }
        }
    }
}

#[test]
fn closed_form_for_order_two() {
    let g = GroupSpec::new(2, 0).unwrap();
    let cache = QuotientCache::new();
    for n in 1..=15i64 {
        let ctx = cache.get(g, n).unwrap();
        for s in 0..=20i64 {
            let x = binomial_one_minus_z(g, s).unwrap();
            assert_eq!(is_zero_in_quotient(&x, &ctx, Locality::Integral).unwrap(), s >= n, "n={n} s={s}");
        }
    }
}

/// Replacing t by u·t, u a unit mod N, never changes the p-local verdict.
#[test]
fn unit_factor_invariance() {
    let cache = QuotientCache::new();
    for (p, k) in GROUPS {
        let g = GroupSpec::new(p, k).unwrap();
        let n_ord = g.order() as u64;
        let us = units(n_ord);
        let profiles: Vec<Vec<usize>> = match k {
            0 => vec![vec![1], vec![2], vec![3]],
            1 => vec![vec![0, 1], vec![1, 1], vec![2, 1], vec![1, 2]],
            _ => vec![vec![0, 0, 1], vec![1, 0, 1], vec![1, 1, 1]],
        };
        for prof in profiles {
            let rep = RepSpec::from_profile(g, &prof).unwrap();
            let d = delta(&rep).unwrap();
            for (idx, &u) in us.iter().enumerate().step_by(us.len().div_ceil(4)) {
                // scale a rotating choice of summands by u
                let scaled: Vec<i64> = rep
                    .exponents()
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| if (i + idx) % 2 == 0 { ((t * u) % n_ord) as i64 } else { t as i64 })
                    .collect();
                let other = RepSpec::new(g, &scaled).unwrap();
                for j in 0..3u32 {
                    for n in (d + i64::from(j) - 1).max(1)..=(d + i64::from(j) + 2) {
                        let ctx = cache.get(g, n).unwrap();
                        let a = lemma41_nonvanishing_in(&EulerQuery::new(rep.clone(), n, j, Locality::PLocal).unwrap(), &ctx).unwrap();
                        let b = lemma41_nonvanishing_in(&EulerQuery::new(other.clone(), n, j, Locality::PLocal).unwrap(), &ctx).unwrap();
                        assert_eq!(a, b, "p={p} k={k} {:?} vs {:?} j={j} n={n}", rep.exponents(), other.exponents());
                    }
                }
            }
        }
    }
}

#[test]
fn prop63_dimensions() {
    for p in [2u64, 3] {
        for k in 1..=3u32 {
            for l in 0..=k {
                for d in (2 * u64::from(l) + 1)..=(2 * u64::from(l) + 4) {
                    let cert = build_prop63(p, k, l, d).unwrap();
                    let (src, tgt) = validate_certificate(&cert).unwrap();
                    assert_eq!(src.summands(), &[(p.pow(k) * (d - 2 * u64::from(l)), 1)]);
                    let target_exp = p.pow(l) % p.pow(k + 1);
                    assert_eq!(tgt.summands(), &[(p.pow(k - l) * d, target_exp)]);
                    assert_eq!(src.group().order() as u64, p.pow(k + 1));
                }
            }
        }
    }
}

#[test]
fn plan_decomposition_ranges() {
    for (p, k) in GROUPS.into_iter().filter(|&(_, k)| k >= 1) {
        let g = GroupSpec::new(p, k).unwrap();
        let k = k as u32;
        for top in 1..=8usize {
            for low in 0..=12usize {
                let mut profile = vec![0; k as usize + 1];
                profile[0] = low;
                profile[k as usize] += top;
                let rep = RepSpec::from_profile(g, &profile).unwrap();
                let Ok(plan) = plan_theorem13(&rep) else { continue };
                for lv in &plan.levels {
                    let unit = p.pow(k - lv.level);
                    assert_eq!(lv.m, lv.n * unit + lv.q);
                    let l = u64::from(lv.level);
                    if lv.m >= unit * (2 * l + 1) {
                        assert!(lv.n >= 1);
                    }
                    if lv.n >= 1 {
                        assert!(2 * l * unit <= lv.q && lv.q < 2 * (l + 1) * unit);
                    }
                }
                validate_certificate(&plan.certificate).unwrap();
            }
        }
    }
}

#[test]
fn combinators_scale_as_expected() {
    let base = Certificate::stolz_meyer(3, 4).unwrap();
    let (src, tgt) = validate_certificate(&base).unwrap();
    let up = Certificate::wreath_power(base.clone()).unwrap();
    let (usrc, utgt) = validate_certificate(&up).unwrap();
    assert_eq!(usrc.dim(), 3 * src.dim());
    assert_eq!(utgt.dim(), 3 * tgt.dim());

    let inf = Certificate::inflate(base).unwrap();
    let (isrc, itgt) = validate_certificate(&inf).unwrap();
    let times_p = |s: &[(u64, u64)]| s.iter().map(|&(a, u)| (a, u * 3)).collect::<Vec<_>>();
    assert_eq!(isrc.summands(), times_p(src.summands()).as_slice());
    assert_eq!(itgt.summands(), times_p(tgt.summands()).as_slice());
}

#[test]
fn big_binomials_stay_exact() {
    // folded coefficients of (1 - z)^64 mod z^25 - 1, against a direct binomial sum
    let g = GroupSpec::new(5, 1).unwrap();
    let x = binomial_one_minus_z(g, 64).unwrap();
    let mut row = vec![BigInt::from(1)];
    for i in 0..64u32 {
        let next = row[i as usize].clone() * (64 - i) / (i + 1);
        row.push(next);
    }
    for r in 0..25usize {
        let expected: BigInt = (r..=64)
            .step_by(25)
            .map(|i| if i % 2 == 0 { row[i].clone() } else { -row[i].clone() })
            .sum();
        assert_eq!(x.coeffs()[r], expected, "residue {r}");
    }
    assert!(x.coeffs().iter().any(|c| c.bits() > 60));
}
