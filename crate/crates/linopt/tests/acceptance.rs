//! Acceptance suite: one test per criterion, pinned tolerances.
//!
//! Each test prints a single summary line; the exact algebraic no-go
//! arguments are encoded as hard-coded oracles independent of the library's
//! numerics wherever the underlying condition system has a closed form.

use std::collections::BTreeMap;
use std::process::Command;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use linopt::criteria::{
    first_order_form, fixed_array_check, hierarchy_value, FirstOrderForm, HierarchyForm,
};
use linopt::estimation::{dephase, min_error_probability, optimize_min_error};
use linopt::feasibility::{
    augment_with_ancilla, conditional_search, find_tower_mode, tower_objective,
    tower_objective_grad, FeasibilityVerdict, ACCEPT_TOL,
};
use linopt::fock::{FockState, Occupation};
use linopt::optics::{bell_analyzer, ModeVector, PassiveUnitary};
use linopt::quadrature::{bs_identity_deviation, bs_quadrature_identity_check, apply_quadrature, QuadratureSpec};
use linopt::states;

const EVIDENCE_TOL: f64 = 1e-3;

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(1e-12..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Uniform (Haar) point on the unit sphere of C².
fn random_pair_amplitudes(rng: &mut ChaCha8Rng) -> (C64, C64) {
    loop {
        let a = C64::new(gauss(rng), gauss(rng));
        let b = C64::new(gauss(rng), gauss(rng));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-6 {
            return (a / n, b / n);
        }
    }
}

fn random_unit_mode(rng: &mut ChaCha8Rng, dim: usize) -> ModeVector {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
        let m = ModeVector(v);
        if m.norm() > 1e-6 {
            return m.normalized();
        }
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> PassiveUnitary {
    PassiveUnitary::from_hermitian(&random_hermitian(rng, dim)).expect("hermitian generator")
}

fn random_state(rng: &mut ChaCha8Rng, modes: usize, max_total: u32) -> FockState {
    loop {
        let mut terms = Vec::new();
        for _ in 0..5 {
            let mut occ = vec![0u32; modes];
            let total = rng.gen_range(0..=max_total);
            for _ in 0..total {
                occ[rng.gen_range(0..modes)] += 1;
            }
            terms.push((
                Occupation(occ),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ));
        }
        if let Ok(s) = FockState::from_terms(modes, terms) {
            if s.norm() > 0.1 {
                return s.normalized();
            }
        }
    }
}

/// Gram-Schmidt a list of random states into an orthonormal set.
fn random_orthogonal_set(
    rng: &mut ChaCha8Rng,
    count: usize,
    modes: usize,
    max_total: u32,
) -> Vec<FockState> {
    let mut out: Vec<FockState> = Vec::new();
    while out.len() < count {
        let mut cand = random_state(rng, modes, max_total);
        for prev in &out {
            let ov = prev.inner(&cand).unwrap();
            cand = cand.add(&prev.scaled(-ov)).unwrap();
        }
        if cand.norm() > 0.1 {
            out.push(cand.normalized());
        }
    }
    out
}

fn unit_basis_entry(dim: usize, i: usize, j: usize, v: f64) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    m[(i, j)] = C64::from(v);
    m
}

/// Distance from `target` to the real span of `basis`, via twice-iterated
/// modified Gram-Schmidt on the vectorized matrices (real and imaginary
/// parts stacked).
fn span_residual(basis: &[DMatrix<C64>], target: &DMatrix<C64>) -> f64 {
    let n = target.nrows() * target.ncols();
    let vectorize = |m: &DMatrix<C64>| {
        DVector::<f64>::from_fn(2 * n, |r, _| {
            let z = m[(r % n / m.ncols(), r % n % m.ncols())];
            if r < n {
                z.re
            } else {
                z.im
            }
        })
    };
    let mut q: Vec<DVector<f64>> = Vec::new();
    for m in basis {
        let mut v = vectorize(m);
        for _ in 0..2 {
            for qi in &q {
                let c = qi.dot(&v);
                v -= qi.scale(c);
            }
        }
        if v.norm() > 1e-10 {
            let norm = v.norm();
            q.push(v.scale(1.0 / norm));
        }
    }
    let mut b = vectorize(target);
    for _ in 0..2 {
        for qi in &q {
            let c = qi.dot(&b);
            b -= qi.scale(c);
        }
    }
    b.norm()
}

// ---------------------------------------------------------------------------

/// Bell-state no-go: the multistart search finds no detection mode, and the
/// closed-form first-order condition system provably forces ν = 0.
#[test]
fn criterion_1_bell_no_go() {
    let bell = states::bell_states();
    let verdict = find_tower_mode(&bell, 100, ACCEPT_TOL, 0).unwrap();
    assert!(!verdict.found(), "unexpected tower mode for the Bell states");
    assert!(
        verdict.residual() > EVIDENCE_TOL,
        "evidence residual {} too small",
        verdict.residual()
    );

    // Hard-coded oracle, part 1: the library's first-order forms equal the
    // closed-form condition system for the six state pairs.
    let h = 0.5;
    let expected: Vec<((usize, usize), DMatrix<C64>)> = vec![
        // (Ψ+,Ψ−): (|ν1|² − |ν2|² − |ν3|² + |ν4|²)/2
        ((0, 1), {
            let mut m = DMatrix::<C64>::zeros(4, 4);
            m[(0, 0)] = C64::from(h);
            m[(1, 1)] = C64::from(-h);
            m[(2, 2)] = C64::from(-h);
            m[(3, 3)] = C64::from(h);
            m
        }),
        // (Φ+,Φ−): (|ν1|² − |ν2|² + |ν3|² − |ν4|²)/2
        ((2, 3), {
            let mut m = DMatrix::<C64>::zeros(4, 4);
            m[(0, 0)] = C64::from(h);
            m[(1, 1)] = C64::from(-h);
            m[(2, 2)] = C64::from(h);
            m[(3, 3)] = C64::from(-h);
            m
        }),
        // (Ψ+,Φ+): Re(ν̄1ν2) + Re(ν̄3ν4)
        ((0, 2), {
            unit_basis_entry(4, 0, 1, h)
                + unit_basis_entry(4, 1, 0, h)
                + unit_basis_entry(4, 2, 3, h)
                + unit_basis_entry(4, 3, 2, h)
        }),
        // (Ψ+,Φ−): antisymmetric combination
        ((0, 3), {
            unit_basis_entry(4, 0, 1, -h)
                + unit_basis_entry(4, 1, 0, h)
                + unit_basis_entry(4, 2, 3, -h)
                + unit_basis_entry(4, 3, 2, h)
        }),
        // (Ψ−,Φ+)
        ((1, 2), {
            unit_basis_entry(4, 0, 1, h)
                + unit_basis_entry(4, 1, 0, -h)
                + unit_basis_entry(4, 2, 3, -h)
                + unit_basis_entry(4, 3, 2, h)
        }),
        // (Ψ−,Φ−)
        ((1, 3), {
            unit_basis_entry(4, 0, 1, -h)
                + unit_basis_entry(4, 1, 0, -h)
                + unit_basis_entry(4, 2, 3, h)
                + unit_basis_entry(4, 3, 2, h)
        }),
    ];
    let mut forms: Vec<FirstOrderForm> = Vec::new();
    for ((k, l), m) in &expected {
        let form = first_order_form(&bell[*k], &bell[*l]).unwrap();
        let diff = (&form.matrix - m).map(|z| z.norm()).max();
        assert!(diff < 1e-12, "pair ({k},{l}): form deviates from closed form by {diff}");
        forms.push(form);
    }

    // Hard-coded oracle, part 2: the conditions force ν = 0. Quantitatively,
    // writing ε for the largest condition magnitude at unit ν, summing and
    // differencing the pairs gives |ν̄1ν2|, |ν̄3ν4| ≤ √2·ε and
    // ||ν1|²−|ν2|²|, ||ν3|²−|ν4|²| ≤ 2ε, hence
    // (|ν1|²+|ν2|²)² ≤ 4ε² + 4·2ε² and likewise for modes 3,4, so
    // 1 ≤ 4√3·ε. Every unit ν must therefore violate some condition by at
    // least 1/(4√3) > 1/128; sampled here at the safe threshold 1/128.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let nu = random_unit_mode(&mut rng, 4);
        let worst = forms
            .iter()
            .map(|f| f.evaluate(&nu).norm())
            .fold(0.0, f64::max);
        assert!(worst >= 1.0 / 128.0, "condition system nearly satisfied at {nu:?}");
    }
    println!(
        "criterion 1 (Bell no-go): PASS — evidence residual {:.3e}, oracle bound 1/128 holds",
        verdict.residual()
    );
}

/// Two-qutrit no-go, its s9-free subset, and the conditional protocol for
/// the s8-free subset with mode 1 measured first.
#[test]
fn criterion_2_qutrit_no_go() {
    let nine = states::qutrit_states(None);
    let v9 = find_tower_mode(&nine, 100, ACCEPT_TOL, 0).unwrap();
    assert!(!v9.found() && v9.residual() > EVIDENCE_TOL, "nine states: {v9:?}");

    // Oracle: the closed-form derived constraints (equal moduli within mode
    // groups {1,2,3} and {4,5,6}, all cross products zero) lie in the real
    // span of the first-order forms, so they are consequences of the
    // condition system; their only common zero is ν = 0.
    let mut basis = Vec::new();
    for k in 0..9 {
        for l in 0..9 {
            if k != l {
                basis.push(first_order_form(&nine[k], &nine[l]).unwrap().matrix);
            }
        }
    }
    let mut targets: Vec<DMatrix<C64>> = vec![
        unit_basis_entry(6, 0, 0, 1.0) - unit_basis_entry(6, 1, 1, 1.0),
        unit_basis_entry(6, 1, 1, 1.0) - unit_basis_entry(6, 2, 2, 1.0),
        unit_basis_entry(6, 3, 3, 1.0) - unit_basis_entry(6, 4, 4, 1.0),
        unit_basis_entry(6, 4, 4, 1.0) - unit_basis_entry(6, 5, 5, 1.0),
    ];
    for (a, b) in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)] {
        targets.push(unit_basis_entry(6, a, b, 1.0));
        targets.push(unit_basis_entry(6, b, a, 1.0));
    }
    for (i, t) in targets.iter().enumerate() {
        let r = span_residual(&basis, t);
        assert!(r < 1e-10, "derived constraint {i} not implied: span residual {r:.3e}");
    }
    // Quantitative consequence, sampled: every unit ν violates some
    // first-order condition by at least 1/72.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let forms: Vec<FirstOrderForm> = (0..9)
        .flat_map(|k| (0..9).filter(move |&l| l != k).map(move |l| (k, l)))
        .map(|(k, l)| first_order_form(&nine[k], &nine[l]).unwrap())
        .collect();
    for _ in 0..1000 {
        let nu = random_unit_mode(&mut rng, 6);
        let worst = forms
            .iter()
            .map(|f| f.evaluate(&nu).norm())
            .fold(0.0, f64::max);
        assert!(worst >= 1.0 / 72.0, "qutrit conditions nearly satisfied at {nu:?}");
    }

    let no_s9 = states::qutrit_states(Some(9));
    let v8 = find_tower_mode(&no_s9, 100, ACCEPT_TOL, 0).unwrap();
    assert!(!v8.found() && v8.residual() > EVIDENCE_TOL, "without s9: {v8:?}");

    let no_s8 = states::qutrit_states(Some(8));
    let v = find_tower_mode(&no_s8, 100, ACCEPT_TOL, 0).unwrap();
    let witness = match &v {
        FeasibilityVerdict::SolutionFound { witness, .. } => witness.clone(),
        other => panic!("expected a tower mode without s8, got {other:?}"),
    };
    let e1 = ModeVector::basis(6, 0);
    let align = witness.dot(&e1).norm();
    assert!(align > 0.999, "witness not aligned with mode 1: |overlap| = {align}");
    let search = conditional_search(&no_s8, 6, 100, 0).unwrap();
    assert!(search.is_ok(), "no conditional protocol without s8: {search:?}");
    println!(
        "criterion 2 (qutrit no-go): PASS — residuals {:.3e} / {:.3e}, witness overlap {align:.6}",
        v9.residual(),
        v8.residual()
    );
}

/// Pair-family no-go: the joint n = 1, 2 tower has no admissible detection
/// mode for entangled pairs, and an ancilla does not change the verdict.
#[test]
fn criterion_3_pair_no_go() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let ancilla = FockState::basis(Occupation::from([1]));
    let mut min_residual = f64::INFINITY;
    let mut violations = Vec::new();
    for draw in 0..20 {
        let (alpha, beta) = loop {
            let (a, b) = random_pair_amplitudes(&mut rng);
            if (a * b).norm() > 0.05 {
                break (a, b);
            }
        };
        let pair = states::pair_family(alpha, beta);
        let verdict = find_tower_mode(&pair, 60, ACCEPT_TOL, 0).unwrap();
        assert!(
            !verdict.found(),
            "draw {draw}: admissible tower mode found for |αβ| = {:.3}",
            (alpha * beta).norm()
        );
        min_residual = min_residual.min(verdict.residual());
        if verdict.residual() <= EVIDENCE_TOL {
            violations.push((draw, (alpha.norm(), beta.norm()), verdict.residual()));
        }

        // the paper's "auxiliary systems never help": appending a
        // fixed-photon-number ancilla leaves the discrimination verdict
        // unchanged (no conditional protocol either way)
        let plain = conditional_search(&pair, 2, 60, 0).unwrap();
        let augmented =
            conditional_search(&augment_with_ancilla(&pair, &ancilla), 3, 60, 0).unwrap();
        assert!(plain.is_err(), "draw {draw}: protocol found without ancilla");
        assert!(augmented.is_err(), "draw {draw}: protocol found with ancilla");
    }
    assert!(
        violations.is_empty(),
        "minimum tower residual {min_residual:.3e} ≤ {EVIDENCE_TOL:.0e} for draws \
         {violations:?}: the n=1,2 tower admits near-solutions with residual \
         ~(|β|³/2|α|)² for skewed amplitudes, so the pinned evidence margin is \
         not attainable for Haar-random draws (the no-solution verdicts above \
         all still hold)"
    );
    println!(
        "criterion 3 (pair no-go): PASS — min evidence residual {min_residual:.3e} over 20 draws"
    );
}

/// Four-state family trichotomy: all-entangled sets fail at the root, two
/// nonmaximally entangled states need conditional dynamics, two maximally
/// entangled states pass with the fixed beam-splitter pair.
#[test]
fn criterion_4_family_trichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // (a) all four entangled: conditional search fails at the root
    for draw in 0..10 {
        let (alpha, beta) = loop {
            let (a, b) = random_pair_amplitudes(&mut rng);
            if (a * b).norm() > 0.05 {
                break (a, b);
            }
        };
        let (gamma, delta) = loop {
            let (g, d) = random_pair_amplitudes(&mut rng);
            if (g * d).norm() > 0.05 {
                break (g, d);
            }
        };
        let family = states::four_state_family(alpha, beta, gamma, delta);
        match conditional_search(&family, 4, 40, 0).unwrap() {
            Err(failure) => assert!(
                failure.path.is_empty(),
                "draw {draw}: failure not at the root: {failure:?}"
            ),
            Ok(protocol) => panic!("draw {draw}: unexpected protocol {protocol:?}"),
        }
    }

    // (b) two nonmaximally entangled states: no fixed array among 50
    // searched unitaries, but a conditional protocol exists
    for draw in 0..3 {
        let (alpha, beta) = loop {
            let (a, b) = random_pair_amplitudes(&mut rng);
            if (a * b).norm() > 0.05 && (a.norm() - b.norm()).abs() > 0.15 {
                break (a, b);
            }
        };
        let family = states::four_state_family(alpha, beta, C64::ONE, C64::ZERO);
        let two = vec![family[0].clone(), family[1].clone()];
        for _ in 0..50 {
            let u = random_unitary(&mut rng, 4);
            let verdict = fixed_array_check(&two, &u, 1e-9).unwrap();
            assert!(!verdict.passed(), "draw {draw}: fixed array unexpectedly passes");
        }
        let search = conditional_search(&two, 4, 60, 0).unwrap();
        assert!(search.is_ok(), "draw {draw}: no conditional protocol: {search:?}");
    }

    // (c) two maximally entangled states: the fixed 50:50 beam-splitter
    // pair satisfies every hierarchy order (here up to 2)
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let family = states::four_state_family(s, s, C64::ONE, C64::ZERO);
    let two = vec![family[0].clone(), family[1].clone()];
    let verdict = fixed_array_check(&two, &bell_analyzer(), 1e-9).unwrap();
    assert!(verdict.passed(), "maximally entangled pair fails the fixed array: {verdict:?}");
    println!("criterion 4 (family trichotomy): PASS — root failure / conditional-only / fixed-array regimes confirmed");
}

/// The minimum-error bound: no interferometer beats error probability 1/4
/// on the four Bell states, and the beam-splitter pair attains it.
#[test]
fn criterion_5_min_error() {
    let bell = states::bell_states();
    let (_, best) = optimize_min_error(&bell, 200, 0).unwrap();
    assert!(
        (0.25 - 1e-9..=0.251).contains(&best),
        "optimized minimum error {best} outside [0.25 − 1e-9, 0.251]"
    );

    let dist = dephase(&bell, &bell_analyzer()).unwrap();
    let expect: [Vec<([u32; 4], f64)>; 4] = [
        vec![([1, 1, 0, 0], 0.5), ([0, 0, 1, 1], 0.5)],
        vec![([1, 0, 0, 1], 0.5), ([0, 1, 1, 0], 0.5)],
        vec![
            ([2, 0, 0, 0], 0.25),
            ([0, 2, 0, 0], 0.25),
            ([0, 0, 2, 0], 0.25),
            ([0, 0, 0, 2], 0.25),
        ],
        vec![
            ([2, 0, 0, 0], 0.25),
            ([0, 2, 0, 0], 0.25),
            ([0, 0, 2, 0], 0.25),
            ([0, 0, 0, 2], 0.25),
        ],
    ];
    for (k, patterns) in expect.iter().enumerate() {
        assert_eq!(dist.per_state[k].len(), patterns.len(), "state {k} support size");
        for (occ, p) in patterns {
            let got = dist.per_state[k][&Occupation::from(*occ)];
            assert!((got - p).abs() < 1e-10, "state {k} pattern {occ:?}: {got} vs {p}");
        }
    }
    let pe = min_error_probability(&dist).unwrap();
    assert!((pe - 0.25).abs() < 1e-12, "beam-splitter min error {pe} ≠ 1/4");
    println!("criterion 5 (min-error bound): PASS — optimized {best:.12}, analyzer error {pe:.12}");
}

/// Beam-splitter quadrature identity, canonical commutator, and the
/// wrong-angle negative control.
#[test]
fn criterion_6_quadrature_identity() {
    let report = bs_quadrature_identity_check(20);
    assert!(report.deviation < 1e-10, "identity deviation {:.3e}", report.deviation);

    let x = QuadratureSpec::new(0, 0.0);
    let p = QuadratureSpec::new(0, std::f64::consts::FRAC_PI_2);
    for n in 0..19u32 {
        let ket = FockState::basis(Occupation::from([n]));
        let xp = apply_quadrature(&apply_quadrature(&ket, p).unwrap(), x).unwrap();
        let px = apply_quadrature(&apply_quadrature(&ket, x).unwrap(), p).unwrap();
        let comm = xp.add(&px.scaled(C64::from(-1.0))).unwrap();
        let dev = comm.add(&ket.scaled(C64::new(0.0, -0.5))).unwrap().norm();
        assert!(dev < 1e-12, "commutator deviates by {dev:.3e} on |{n}⟩");
    }

    let wrong = bs_identity_deviation(6, std::f64::consts::FRAC_PI_3, std::f64::consts::PI);
    assert!(wrong > 0.05, "negative control too small: {wrong}");
    println!(
        "criterion 6 (quadrature identity): PASS — deviation {:.3e}, control {:.3}",
        report.deviation, wrong
    );
}

/// Six randomized property suites, 1000 cases each.
#[test]
fn criterion_7_property_suites() {
    // (a) interferometer action: inner-product preservation, composition
    // homomorphism, photon-number conservation
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=4);
        let u = random_unitary(&mut rng, dim);
        let v = random_unitary(&mut rng, dim);
        let psi = random_state(&mut rng, dim, 3);
        let phi = random_state(&mut rng, dim, 3);
        let upsi = u.apply(&psi).unwrap();
        let uphi = u.apply(&phi).unwrap();
        assert!(
            (upsi.inner(&uphi).unwrap() - psi.inner(&phi).unwrap()).norm() < 1e-10,
            "inner product not preserved"
        );
        let via_compose = u.compose(&v).unwrap().apply(&psi).unwrap();
        let via_steps = u.apply(&v.apply(&psi).unwrap()).unwrap();
        let diff = via_compose.add(&via_steps.scaled(C64::from(-1.0))).unwrap().norm();
        assert!(diff < 1e-10, "composition homomorphism violated by {diff:.3e}");
        // photon conservation: the norm within each total-photon sector is
        // preserved
        let sector_mass = |s: &FockState| {
            let mut m: BTreeMap<u32, f64> = BTreeMap::new();
            for (occ, amp) in s.terms() {
                *m.entry(occ.total()).or_insert(0.0) += amp.norm_sqr();
            }
            m
        };
        let before = sector_mass(&psi);
        let after = sector_mass(&upsi);
        for (t, p) in &before {
            let q = after.get(t).copied().unwrap_or(0.0);
            assert!((p - q).abs() < 1e-10, "sector {t} mass changed: {p} vs {q}");
        }
    }

    // (b) number-ordered vs normally-ordered forms agree once the lower
    // orders vanish: exactly for distinct orthogonal modes (the commutator
    // is the row inner product), and after projecting out the first-order
    // value for a repeated mode
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for case in 0..1000 {
        let modes = rng.gen_range(2..=3);
        let chi_k = random_state(&mut rng, modes, 3);
        if case % 2 == 0 {
            // distinct orthonormal modes: unconditional equality
            let nu = random_unit_mode(&mut rng, modes);
            let mut mu = random_unit_mode(&mut rng, modes);
            let ov = nu.dot(&mu);
            let v: Vec<C64> = mu
                .as_slice()
                .iter()
                .zip(nu.as_slice())
                .map(|(m, n)| m - ov * n)
                .collect();
            mu = ModeVector(v).normalized();
            let chi_l = random_state(&mut rng, modes, 3);
            let tuple = [nu, mu];
            let a = hierarchy_value(&chi_k, &chi_l, &tuple, HierarchyForm::NumberOrdered).unwrap();
            let b =
                hierarchy_value(&chi_k, &chi_l, &tuple, HierarchyForm::NormallyOrdered).unwrap();
            assert!((a - b).norm() < 1e-9, "orthogonal-mode forms differ: {a} vs {b}");
        } else {
            // repeated mode: project χ_l against the first-order functional
            let nu = random_unit_mode(&mut rng, modes);
            let w = chi_k
                .mode_annihilate(nu.as_slice())
                .unwrap()
                .mode_create(&nu.as_slice().iter().map(|z| z.conj()).collect::<Vec<_>>())
                .unwrap();
            let mut chi_l = random_state(&mut rng, modes, 3);
            if w.norm() > 1e-8 {
                let coef = w.inner(&chi_l).unwrap() / C64::from(w.norm_sqr());
                chi_l = chi_l.add(&w.scaled(-coef)).unwrap();
            }
            if chi_l.norm() < 1e-6 {
                continue;
            }
            let lower =
                hierarchy_value(&chi_k, &chi_l, &[nu.clone()], HierarchyForm::NormallyOrdered)
                    .unwrap();
            assert!(lower.norm() < 1e-9, "projection failed: first order {lower}");
            let tuple = [nu.clone(), nu];
            let a = hierarchy_value(&chi_k, &chi_l, &tuple, HierarchyForm::NumberOrdered).unwrap();
            let b =
                hierarchy_value(&chi_k, &chi_l, &tuple, HierarchyForm::NormallyOrdered).unwrap();
            assert!(
                (a - b).norm() < 1e-9,
                "repeated-mode forms differ after projection: {a} vs {b}"
            );
        }
    }

    // (c) first_order_form is conjugate-linear in the bra and linear in the
    // ket
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..1000 {
        let modes = rng.gen_range(2..=3);
        let x1 = random_state(&mut rng, modes, 2);
        let x2 = random_state(&mut rng, modes, 2);
        let y = random_state(&mut rng, modes, 2);
        let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let combo = x1.scaled(a).add(&x2.scaled(b)).unwrap();
        let lhs = first_order_form(&combo, &y).unwrap().matrix;
        let rhs = first_order_form(&x1, &y).unwrap().matrix * a.conj()
            + first_order_form(&x2, &y).unwrap().matrix * b.conj();
        assert!((lhs.clone() - rhs).map(|z| z.norm()).max() < 1e-10, "bra sesquilinearity");
        let lhs = first_order_form(&y, &combo).unwrap().matrix;
        let rhs = first_order_form(&y, &x1).unwrap().matrix * a
            + first_order_form(&y, &x2).unwrap().matrix * b;
        assert!((lhs - rhs).map(|z| z.norm()).max() < 1e-10, "ket linearity");
    }

    // (d) dephasing trace identity: Σ_i P(i|k)P(i|l) equals the dephased
    // operator overlap computed independently by exact phase-grid averaging
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..1000 {
        let modes = rng.gen_range(2..=3);
        let max_total = 2u32;
        let chi_k = random_state(&mut rng, modes, max_total);
        let chi_l = random_state(&mut rng, modes, max_total);
        let u = random_unitary(&mut rng, modes);
        let dist = dephase(&[chi_k.clone(), chi_l.clone()], &u).unwrap();
        let lhs: f64 = dist.per_state[0]
            .iter()
            .filter_map(|(occ, pk)| dist.per_state[1].get(occ).map(|pl| pk * pl))
            .sum();
        // oracle: average |⟨Uχ_k| e^{i y·n̂} |Uχ_l⟩|² over the exact
        // trigonometric quadrature grid
        let uk = u.apply(&chi_k).unwrap();
        let ul = u.apply(&chi_l).unwrap();
        let grid = (2 * max_total + 1) as usize;
        let mut acc = 0.0;
        let mut idx = vec![0usize; modes];
        loop {
            let mut elem = C64::ZERO;
            for (occ, al) in ul.terms() {
                let ak = uk.amplitude(occ);
                if ak.norm() == 0.0 {
                    continue;
                }
                let phase: f64 = occ
                    .0
                    .iter()
                    .zip(&idx)
                    .map(|(n, y)| {
                        *n as f64 * std::f64::consts::TAU * *y as f64 / grid as f64
                    })
                    .sum();
                elem += ak.conj() * al * C64::from_polar(1.0, phase);
            }
            acc += elem.norm_sqr();
            // odometer over the phase grid
            let mut j = 0;
            loop {
                idx[j] += 1;
                if idx[j] < grid {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == modes {
                    break;
                }
            }
            if j == modes {
                break;
            }
        }
        let rhs = acc / (grid as f64).powi(modes as i32);
        assert!((lhs - rhs).abs() < 1e-10, "trace identity: {lhs} vs {rhs}");
    }

    // (e) fixed_array_check passes exactly when the dephased supports are
    // pairwise disjoint (brute-force distribution oracle)
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut passes = 0usize;
    for case in 0..1000 {
        let modes = rng.gen_range(2..=3);
        let (set, u) = if case % 5 == 0 {
            // engineered pass side: distinct basis states through a mode
            // permutation stay disjoint
            let mut occs: Vec<Vec<u32>> = Vec::new();
            while occs.len() < 2 {
                let mut occ = vec![0u32; modes];
                for _ in 0..rng.gen_range(1..=3u32) {
                    occ[rng.gen_range(0..modes)] += 1;
                }
                if !occs.contains(&occ) {
                    occs.push(occ);
                }
            }
            let set: Vec<FockState> = occs
                .into_iter()
                .map(|o| FockState::basis(Occupation(o)))
                .collect();
            let mut m = DMatrix::<C64>::zeros(modes, modes);
            let mut perm: Vec<usize> = (0..modes).collect();
            for i in (1..modes).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            for (i, j) in perm.into_iter().enumerate() {
                m[(i, j)] = C64::ONE;
            }
            (set, PassiveUnitary::new(m).unwrap())
        } else {
            let k = rng.gen_range(2..=3);
            (
                random_orthogonal_set(&mut rng, k, modes, 3),
                random_unitary(&mut rng, modes),
            )
        };
        let verdict = fixed_array_check(&set, &u, 1e-9).unwrap();
        let dist = dephase(&set, &u).unwrap();
        let mut max_overlap = 0.0f64;
        for a in 0..set.len() {
            for b in (a + 1)..set.len() {
                max_overlap = max_overlap.max(dist.support_overlap(a, b));
            }
        }
        let disjoint = max_overlap < 1e-7;
        assert_eq!(
            verdict.passed(),
            disjoint,
            "hierarchy/support mismatch (overlap {max_overlap:.3e}, case {case})"
        );
        if verdict.passed() {
            passes += 1;
        }
    }
    assert!(passes >= 100, "pass side under-exercised: {passes} of 1000");

    // (f) analytic tower gradient vs central finite differences
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..1000 {
        let modes = rng.gen_range(2..=3);
        let set = random_orthogonal_set(&mut rng, 2, modes, 2);
        let p = DVector::from_fn(2 * modes, |_, _| rng.gen_range(-1.0..1.0));
        if p.norm() < 0.3 {
            continue;
        }
        let (_, grad) = tower_objective_grad(&set, &p).unwrap();
        let h = 1e-6;
        let mut fd = DVector::zeros(2 * modes);
        for i in 0..2 * modes {
            let mut pp = p.clone();
            pp[i] += h;
            let nu_p = ModeVector(
                (0..modes)
                    .map(|j| C64::new(pp[j], pp[modes + j]) / C64::from(pp.norm()))
                    .collect(),
            );
            let fp = tower_objective(&set, &nu_p).unwrap();
            let mut pm = p.clone();
            pm[i] -= h;
            let nu_m = ModeVector(
                (0..modes)
                    .map(|j| C64::new(pm[j], pm[modes + j]) / C64::from(pm.norm()))
                    .collect(),
            );
            let fm = tower_objective(&set, &nu_m).unwrap();
            fd[i] = (fp - fm) / (2.0 * h);
        }
        let denom = grad.norm().max(fd.norm()).max(1e-3);
        let rel = (grad.clone() - fd).norm() / denom;
        assert!(rel < 1e-5, "gradient mismatch: relative error {rel:.3e}");
    }

    println!("criterion 7 (property suites): PASS — six suites × 1000 cases");
}

/// Byte-identical reports for identical inputs and seed.
#[test]
fn criterion_8_determinism() {
    let bin = env!("CARGO_BIN_EXE_linopt");
    let dir = env!("CARGO_MANIFEST_DIR");
    let runs: [&[&str]; 4] = [
        &["check-fixed", "fixtures/bell2_psi.json", "fixtures/bell_analyzer4.json"],
        &["search", "fixtures/pair2011.json", "--mode", "tower", "--restarts", "40", "--seed", "7"],
        &["search", "fixtures/qutrit8_no_s8.json", "--mode", "conditional", "--restarts", "30"],
        &["dephase", "fixtures/bell4.json", "fixtures/bell_analyzer4.json"],
    ];
    for args in runs {
        let mut outputs: Vec<Vec<u8>> = Vec::new();
        let mut statuses = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin)
                .args(args)
                .current_dir(dir)
                .output()
                .expect("spawn linopt");
            assert!(!out.stdout.is_empty(), "no report from {args:?}");
            statuses.push(out.status.code());
            outputs.push(out.stdout);
        }
        assert_eq!(outputs[0], outputs[1], "reports differ for {args:?}");
        assert_eq!(statuses[0], statuses[1], "exit codes differ for {args:?}");
        let report: serde_json::Value =
            serde_json::from_slice(&outputs[0]).expect("report parses as JSON");
        assert!(report.get("result").is_some(), "report missing result for {args:?}");
    }
    println!("criterion 8 (determinism): PASS — byte-identical reports across reruns");
}

/// Shipped fixtures round-trip through the document format.
#[test]
fn fixtures_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut checked = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if text.contains("\"rows\"") {
            let doc: linopt::cli::UnitaryDocument = serde_json::from_str(&text).unwrap();
            doc.to_unitary().unwrap();
        } else {
            let doc: linopt::cli::StateSetDocument = serde_json::from_str(&text).unwrap();
            let states = doc.signal_states().unwrap();
            assert!(!states.is_empty());
            let round: linopt::cli::StateSetDocument =
                serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
            assert_eq!(serde_json::to_string(&doc).unwrap(), serde_json::to_string(&round).unwrap());
        }
        checked += 1;
    }
    assert!(checked >= 8, "expected the shipped fixtures, found {checked}");
}
