//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use common::{loglog_slope, regular_polygon, richardson_derivative, wrapped_diff, Lcg};
use lazutkin_ellipse::asymptotics::{alpha, beta, lambda_q_series, omega_series};
use lazutkin_ellipse::elliptic::{d2_am, incomplete_f, jacobi_am, jacobi_triple, Modulus};
use lazutkin_ellipse::harness::{run_verification, BetaForm, ConventionChoice, VerifyConfig};
use lazutkin_ellipse::lazutkin::{lazutkin_weight, lazutkin_x, LazutkinChart};
use lazutkin_ellipse::orbits::{orbit_from_caustic, orbit_variational, solve_lambda_q};
use lazutkin_ellipse::{Convention, Ellipse};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn special_functions() -> Outcome {
    let mut ident = 0.0_f64;
    let mut round_trip = 0.0_f64;
    let mut deriv = 0.0_f64;
    for i in 0..50 {
        let u = -10.0 + 20.0 * i as f64 / 49.0;
        for j in 1..=9 {
            let k = 0.1 * j as f64;
            let m = Modulus::new(k).unwrap();
            let t = jacobi_triple(u, m);
            ident = ident
                .max((t.sn * t.sn + t.cn * t.cn - 1.0).abs())
                .max((t.dn * t.dn - 1.0 + k * k * t.sn * t.sn).abs());
            round_trip = round_trip.max((incomplete_f(jacobi_am(u, m), m) - u).abs());
            let fd = richardson_derivative(|kk| jacobi_am(u, Modulus::new(kk).unwrap()), k, 1e-5);
            deriv = deriv.max((d2_am(u, m) - fd).abs());
        }
    }
    outcome(
        ident <= 1e-12 && round_trip <= 1e-12 && deriv <= 1e-8,
        format!(
            "identities {ident:.1e}, F/am round trip {round_trip:.1e}, d2_am vs FD {deriv:.1e}"
        ),
    )
}

fn lazutkin_cross_check() -> Outcome {
    let mut rng = Lcg::new(20240917);
    let mut dx = 0.0_f64;
    let mut dmu = 0.0_f64;
    for e in [0.2, 0.5, 0.8] {
        let el = Ellipse::new(e).unwrap();
        let chart = LazutkinChart::new(el).unwrap();
        for _ in 0..50 {
            let phi = 2.0 * PI * rng.next_f64();
            let x = lazutkin_x(phi, &el);
            dx = dx.max(wrapped_diff(x, chart.x_quadrature(phi).unwrap(), 1.0).abs());
            dmu = dmu.max((lazutkin_weight(x, &el) - chart.weight_at_phi(phi)).abs());
        }
    }
    outcome(
        dx <= 1e-9 && dmu <= 1e-9,
        format!("coordinate {dx:.1e}, weight {dmu:.1e}"),
    )
}

fn orbit_equivalence() -> Outcome {
    let mut vertex = 0.0_f64;
    let mut closure = 0.0_f64;
    for e in [0.2, 0.5, 0.8] {
        let el = Ellipse::new(e).unwrap();
        for q in [5, 9, 16, 33] {
            let c = orbit_from_caustic(q, &el, Convention::B).unwrap();
            let v = orbit_variational(q, &el).unwrap();
            for k in 0..q {
                vertex = vertex.max((c.phi[k] - v.phi[k]).abs());
            }
            closure = closure.max(c.closure_residual).max(v.closure_residual);
        }
    }
    let el = Ellipse::new(0.5).unwrap();
    let lam = 0.41 * el.b;
    let omega = el.caustic_params(lam).unwrap().omega_lambda;
    let traj = el.tangent_trajectory(0.9, lam, 50).unwrap();
    let s0 = el.action_coordinate(traj[0], lam).unwrap();
    let shift = traj
        .iter()
        .enumerate()
        .map(|(n, &p)| (el.action_coordinate(p, lam).unwrap() - s0 - n as f64 * omega).abs())
        .fold(0.0, f64::max);
    outcome(
        vertex <= 1e-9 && closure <= 1e-10 && shift <= 1e-10,
        format!("vertices {vertex:.1e}, closure {closure:.1e}, action shift {shift:.1e}"),
    )
}

fn series_orders() -> Outcome {
    let el = Ellipse::new(0.5).unwrap();
    let lq: Vec<(f64, f64)> = [16, 32, 64, 128, 256]
        .iter()
        .map(|&q| {
            let exact = solve_lambda_q(q, &el).unwrap();
            (q as f64, (exact - lambda_q_series(q, &el)).abs())
        })
        .collect();
    let om: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&s| {
            let lam = s * el.b;
            let exact = el.caustic_params(lam).unwrap().omega_lambda;
            (lam, (exact - omega_series(lam, &el)).abs())
        })
        .collect();
    let (sl, so) = (loglog_slope(&lq), loglog_slope(&om));
    outcome(
        (sl + 5.0).abs() <= 0.5 && (so - 5.0).abs() <= 0.5,
        format!("caustic parameter slope {sl:.3}, rotation number slope {so:.3}"),
    )
}

fn headline(e: f64) -> VerifyConfig {
    VerifyConfig {
        e,
        convention: ConventionChoice::Auto,
        ..VerifyConfig::default()
    }
}

fn alpha_check() -> Outcome {
    let report = run_verification(&headline(0.5)).unwrap();
    let slope = report.alpha.fit.as_ref().map_or(f64::NAN, |f| f.slope);
    let sup = report
        .alpha
        .richardson
        .as_ref()
        .map_or(f64::NAN, |r| r.sup_error);
    outcome(
        report.flags.alpha_slope && report.flags.alpha_richardson,
        format!(
            "convention {}, slope {slope:.3}, Richardson sup {sup:.2e}",
            report.convention
        ),
    )
}

fn beta_check() -> Outcome {
    let report = run_verification(&headline(0.5)).unwrap();
    let slope = report.beta.fit.as_ref().map_or(f64::NAN, |f| f.slope);
    let sup = report
        .beta
        .richardson
        .as_ref()
        .map_or(f64::NAN, |r| r.sup_error);
    let other_slope = report.beta_other.fit.as_ref().map_or(f64::NAN, |f| f.slope);
    let other_sup = report
        .beta_other
        .richardson
        .as_ref()
        .map_or(f64::NAN, |r| r.sup_error);
    outcome(
        report.flags.beta_slope && report.flags.beta_richardson,
        format!(
            "slope {slope:.3}, Richardson sup {sup:.2e} \
             [diagnostic, caustic-identity form: slope {other_slope:.3}, sup {other_sup:.2e}]"
        ),
    )
}

fn degeneracy() -> Outcome {
    let el = Ellipse::new(1e-4).unwrap();
    let ts: Vec<f64> = (0..256).map(|i| i as f64 / 256.0).collect();
    let sup_a = ts.iter().map(|&t| alpha(t, &el).abs()).fold(0.0, f64::max);
    let sup_b = ts.iter().map(|&t| beta(t, &el).abs()).fold(0.0, f64::max);
    let report = run_verification(&headline(1e-4)).unwrap();
    let r_a = report.periods.iter().map(|p| p.r_alpha).fold(0.0, f64::max);
    let r_b = report.periods.iter().map(|p| p.r_beta).fold(0.0, f64::max);
    let mut poly = 0.0_f64;
    for q in [5, 16, 64, 256] {
        let orbit = orbit_from_caustic(q, &el, Convention::B).unwrap();
        for (phi, reg) in orbit.phi.iter().zip(regular_polygon(q)) {
            poly = poly.max(wrapped_diff(*phi, reg, 2.0 * PI).abs());
        }
    }
    outcome(
        sup_a <= 1e-3 && sup_b <= 1e-2 && r_a <= 1e-3 && r_b <= 1e-2 && poly <= 1e-6,
        format!(
            "sup|alpha| {sup_a:.1e}, sup|beta| {sup_b:.3e}, r_alpha {r_a:.1e}, \
             r_beta {r_b:.3e}, polygon {poly:.1e}"
        ),
    )
}

fn symmetry() -> Outcome {
    let el = Ellipse::new(0.5).unwrap();
    let mut da = 0.0_f64;
    let mut db = 0.0_f64;
    for i in 0..128 {
        let t = i as f64 / 128.0;
        da = da.max((alpha(t, &el) + alpha(1.0 - t, &el)).abs());
        db = db.max((beta(t, &el) - beta(1.0 - t, &el)).abs());
    }
    outcome(
        da <= 1e-8 && db <= 1e-8,
        format!("alpha oddness {da:.1e}, beta evenness {db:.1e}"),
    )
}

fn negative_control() -> Outcome {
    let cfg = VerifyConfig {
        alpha_scale: 1.5,
        beta_form: BetaForm::Closed,
        ..headline(0.5)
    };
    let report = run_verification(&cfg).unwrap();
    let slope = report.alpha.fit.as_ref().map_or(f64::NAN, |f| f.slope);
    outcome(
        !report.flags.alpha_slope && slope > -1.0,
        format!("scaled alpha slope {slope:.3}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("special functions", special_functions),
        ("Lazutkin chart cross-check", lazutkin_cross_check),
        ("orbit oracle equivalence", orbit_equivalence),
        ("series orders", series_orders),
        ("alpha coefficient", alpha_check),
        ("beta coefficient", beta_check),
        ("circle degeneracy", degeneracy),
        ("symmetry", symmetry),
        ("negative control", negative_control),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            n + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
