//! Built-in invariant suite: quick structural checks covering every module,
//! runnable in the field without the development test harness.

use nalgebra::DMatrix;
use num_complex::Complex64;

use spinlie::fields::{FieldSpec, Program};
use spinlie::grid::TimeGrid;
use spinlie::liesys::{
    generator_set, solve_fsys, solve_group_equation, vector_field_bracket, AlgebraCurve, Mat4,
    TargetCurve,
};
use spinlie::oracle::{observed_order, rk4_propagate, Initial};
use spinlie::spinrep::{build_spin_operators, exp_hermitian, SpinQuantumNumber};
use spinlie::su2::{bracket, exp_algebra, log_principal, AlgebraVector, GroupElement};

type C64 = Complex64;

/// One named invariant group.
pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<(), String>,
}

fn fail(msg: impl Into<String>) -> Result<(), String> {
    Err(msg.into())
}

fn su2_bracket_table() -> Result<(), String> {
    let e = [
        AlgebraVector::new(1.0, 0.0, 0.0).unwrap(),
        AlgebraVector::new(0.0, 1.0, 0.0).unwrap(),
        AlgebraVector::new(0.0, 0.0, 1.0).unwrap(),
    ];
    for (a, b, c) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
        let got = bracket(e[a], e[b]);
        let want = e[c].scaled(-1.0);
        if (got - want).norm() > 1e-14 {
            return fail(format!("[a{},a{}] != -a{}", a + 1, b + 1, c + 1));
        }
    }
    // Jacobi on a fixed triple
    let x = AlgebraVector::new(0.3, -0.1, 0.7).unwrap();
    let y = AlgebraVector::new(-0.2, 0.9, 0.4).unwrap();
    let z = AlgebraVector::new(0.5, 0.2, -0.6).unwrap();
    let total = bracket(x, bracket(y, z))
        + bracket(y, bracket(z, x))
        + bracket(z, bracket(x, y));
    if total.norm() > 1e-14 {
        return fail(format!("Jacobi residual {:.3e}", total.norm()));
    }
    Ok(())
}

fn generator_table() -> Result<(), String> {
    let gens = generator_set();
    let diff = |a: &Mat4, b: &Mat4| -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for k in 0..4 {
                worst = worst.max((a[i][k] - b[i][k]).abs());
            }
        }
        worst
    };
    let neg = |m: &Mat4| -> Mat4 {
        let mut out = *m;
        out.iter_mut().flatten().for_each(|v| *v = -*v);
        out
    };
    for (a, b, c) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
        if diff(&vector_field_bracket(&gens.n[a], &gens.n[b]), &neg(&gens.n[c])) > 1e-14 {
            return fail(format!("[N{},N{}] != -N{}", a + 1, b + 1, c + 1));
        }
        if diff(
            &vector_field_bracket(&gens.n_primed[a], &gens.n_primed[b]),
            &neg(&gens.n_primed[c]),
        ) > 1e-14
        {
            return fail(format!("primed [N{},N{}] != -N{}", a + 1, b + 1, c + 1));
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            if diff(
                &vector_field_bracket(&gens.n[a], &gens.n_primed[b]),
                &[[0.0; 4]; 4],
            ) > 1e-14
            {
                return fail(format!("[N{},N'{}] != 0", a + 1, b + 1));
            }
        }
    }
    Ok(())
}

fn spin_operator_relations() -> Result<(), String> {
    let i = C64::new(0.0, 1.0);
    for two_j in [1u32, 2, 3, 4] {
        let ops = build_spin_operators(SpinQuantumNumber::new(two_j).unwrap());
        let s = [ops.sx(), ops.sy(), ops.sz()];
        let dim = ops.dimension();
        let eps = |a: usize, b: usize, c: usize| -> f64 {
            match (a, b, c) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        for a in 0..3 {
            for b in 0..3 {
                let mut resid = (s[a] * s[b] - s[b] * s[a]) * (i * i);
                for (c, item) in s.iter().enumerate() {
                    resid += (*item * i).scale(eps(a, b, c));
                }
                let worst = resid.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if worst > 1e-12 {
                    return fail(format!("two_j = {two_j}: commutation residual {worst:.3e}"));
                }
            }
        }
        let jv = two_j as f64 / 2.0;
        let casimir = s[0] * s[0] + s[1] * s[1] + s[2] * s[2]
            - DMatrix::<C64>::identity(dim, dim).scale(jv * (jv + 1.0));
        let worst = casimir.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if worst > 1e-12 {
            return fail(format!("two_j = {two_j}: Casimir residual {worst:.3e}"));
        }
    }
    Ok(())
}

fn flow_commutator_convergence() -> Result<(), String> {
    // fixed Hermitian pair, dimension 3
    let h_a = DMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(0.4, 0.0),
            C64::new(0.2, 0.5),
            C64::new(-0.1, 0.3),
            C64::new(0.2, -0.5),
            C64::new(-0.7, 0.0),
            C64::new(0.6, -0.2),
            C64::new(-0.1, -0.3),
            C64::new(0.6, 0.2),
            C64::new(0.1, 0.0),
        ],
    );
    let h_b = DMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(-0.3, 0.0),
            C64::new(0.8, -0.1),
            C64::new(0.2, 0.4),
            C64::new(0.8, 0.1),
            C64::new(0.5, 0.0),
            C64::new(-0.3, 0.6),
            C64::new(0.2, -0.4),
            C64::new(-0.3, -0.6),
            C64::new(-0.2, 0.0),
        ],
    );
    let i = C64::new(0.0, 1.0);
    let a = h_a.clone() * (-i);
    let b = h_b.clone() * (-i);
    let commutator = (&b * &a - &a * &b).scale(2.0);
    let second_diff = |t: f64| -> f64 {
        let f = |t: f64| {
            let fa = exp_hermitian(&h_a, t).unwrap();
            let fb = exp_hermitian(&h_b, t).unwrap();
            let fam = exp_hermitian(&h_a, -t).unwrap();
            let fbm = exp_hermitian(&h_b, -t).unwrap();
            fbm.matrix() * fam.matrix() * fb.matrix() * fa.matrix()
        };
        let num = (f(t) + f(-t) - DMatrix::<C64>::identity(3, 3).scale(2.0))
            / C64::new(t * t, 0.0);
        (num - &commutator)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (second_diff(0.02), second_diff(0.01));
    let ratio = e1 / e2;
    if !(2.5..6.5).contains(&ratio) {
        return fail(format!("second-difference ratio {ratio:.2} not ~4"));
    }
    Ok(())
}

fn first_integral_on_trajectory() -> Result<(), String> {
    let b = AlgebraCurve::from_field(FieldSpec::rotating_example());
    let target = TargetCurve::AxisZ {
        d: Program::Sinusoid {
            amp: 0.5,
            freq: 0.9,
            phase: 0.1,
            offset: 0.2,
        },
    };
    let g0 = exp_algebra(AlgebraVector::new(0.3, -0.8, 1.1).unwrap()).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 5000).unwrap();
    let traj = solve_fsys(&b, &target, &g0, &grid).map_err(|e| e.to_string())?;
    let err = traj.max_first_integral_error();
    if err > 1e-10 {
        return fail(format!("first-integral drift {err:.3e}"));
    }
    Ok(())
}

fn exp_log_round_trip() -> Result<(), String> {
    for &delta in &[1e-9, 0.1, 1.0, 3.0, 6.0] {
        for &(n1, n2, n3) in &[(1.0, 0.0, 0.0), (0.0, 0.6, -0.8), (0.48, -0.6, 0.64)] {
            let c = AlgebraVector::new(delta * n1, delta * n2, delta * n3).unwrap();
            let g = exp_algebra(c).map_err(|e| e.to_string())?;
            let back = log_principal(&g).map_err(|e| e.to_string())?;
            if (back - c).norm() > 1e-10 {
                return fail(format!("round trip failed at delta = {delta}"));
            }
        }
    }
    if log_principal(&GroupElement::from_coordinates(-1.0, 0.0, 0.0, 0.0).unwrap()).is_ok() {
        return fail("log at -identity should be rejected");
    }
    Ok(())
}

fn convergence_orders() -> Result<(), String> {
    let field = FieldSpec::rotating_example();
    let b = AlgebraCurve::from_field(field.clone());
    let ops = build_spin_operators(SpinQuantumNumber::new(1).unwrap());

    // group midpoint vs a refined run
    let reference = {
        let grid = TimeGrid::new(0.0, 5.0, 32_000).unwrap();
        *solve_group_equation(&b, &grid).unwrap().final_element()
    };
    let group_err = |steps: usize| -> f64 {
        let grid = TimeGrid::new(0.0, 5.0, steps).unwrap();
        let traj = solve_group_equation(&b, &grid).unwrap();
        traj.final_element()
            .coordinates()
            .iter()
            .zip(reference.coordinates().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [250usize, 500, 1000].iter().map(|&s| group_err(s)).collect();
    let order = observed_order(&errors);
    if !(1.7..=2.3).contains(&order) {
        return fail(format!("group midpoint order {order:.2}"));
    }

    // rk4 vs a refined run
    let reference = {
        let grid = TimeGrid::new(0.0, 5.0, 8000).unwrap();
        rk4_propagate(&field, &ops, Initial::Identity, &grid)
            .unwrap()
            .final_sample()
            .clone()
    };
    let rk4_err = |steps: usize| -> f64 {
        let grid = TimeGrid::new(0.0, 5.0, steps).unwrap();
        let out = rk4_propagate(&field, &ops, Initial::Identity, &grid).unwrap();
        (out.final_sample() - &reference)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [250usize, 500, 1000].iter().map(|&s| rk4_err(s)).collect();
    let order = observed_order(&errors);
    if !(3.7..=4.3).contains(&order) {
        return fail(format!("rk4 order {order:.2}"));
    }
    Ok(())
}

/// The full list of invariant groups.
pub fn all_checks() -> Vec<Check> {
    vec![
        Check {
            name: "su2 bracket table and Jacobi identity",
            run: su2_bracket_table,
        },
        Check {
            name: "transformation-system generator table",
            run: generator_table,
        },
        Check {
            name: "spin commutation and Casimir (j = 1/2 .. 2)",
            run: spin_operator_relations,
        },
        Check {
            name: "flow-commutator second-difference convergence",
            run: flow_commutator_convergence,
        },
        Check {
            name: "first integral along a transformation trajectory",
            run: first_integral_on_trajectory,
        },
        Check {
            name: "exp/log round trip",
            run: exp_log_round_trip,
        },
        Check {
            name: "integrator convergence orders",
            run: convergence_orders,
        },
    ]
}

/// Runs a list of checks, printing one line each; returns the exit code.
pub fn run_checks(checks: &[Check]) -> i32 {
    let mut failures = 0usize;
    for check in checks {
        match (check.run)() {
            Ok(()) => println!("ok    {}", check.name),
            Err(msg) => {
                println!("FAIL  {}: {msg}", check.name);
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("selftest: all {} invariant groups passed", checks.len());
        0
    } else {
        println!("selftest: {failures} of {} invariant groups failed", checks.len());
        1
    }
}
