//! Scratch driver: VQE quality on the hardest reference rows.

use bethe_vqe_core::bethe::RootVector;
use bethe_vqe_core::betheq::max_orbit_distance;
use bethe_vqe_core::model::ChainModel;
use bethe_vqe_core::sim::EvaluatorKind;
use bethe_vqe_core::vqe::{vqe_excited, vqe_ground, OptimizerConfig, RootTemplate};
use num_complex::Complex64;
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Case {
    label: &'static str,
    model: ChainModel,
    template: &'static str,
    theta0: Vec<f64>,
    statevector: Vec<Complex64>,
    excited: bool,
    tol: f64,
}

fn main() {
    let open = |l: usize| ChainModel::open(l, 0.5, 3.0, 0.3).unwrap();
    let closed = |l: usize| ChainModel::closed(l, 2.0).unwrap();
    let cases = vec![
        Case {
            label: "T1 L=6 ground",
            model: closed(6),
            template: "r,r,r",
            theta0: vec![1.5, -1.5, 3.1],
            statevector: vec![c(1.4986, 0.0), c(-1.4986, 0.0), c(3.1416, 0.0)],
            excited: false,
            tol: 1e-3,
        },
        Case {
            label: "T2 L=5 ground",
            model: open(5),
            template: "c,r,r",
            theta0: vec![3.1, 0.9, 1.5, 2.3],
            statevector: vec![c(3.1399, 0.9144), c(1.4958, 0.0), c(2.3157, 0.0)],
            excited: false,
            tol: 2e-2,
        },
        Case {
            label: "T2 L=6 ground",
            model: open(6),
            template: "c,r,r",
            theta0: vec![3.1, 0.9, 1.8, 2.5],
            statevector: vec![c(3.1419, 0.9131), c(1.8266, 0.0), c(2.4712, 0.0)],
            excited: false,
            tol: 2e-2,
        },
        Case {
            label: "T3 L=6 M=3 excited",
            model: closed(6),
            template: "p,r",
            theta0: vec![0.25, 1.4, 1.6],
            statevector: vec![c(0.2451, 1.4120), c(0.2451, -1.4120), c(1.6023, 0.0)],
            excited: true,
            tol: 2e-2,
        },
        Case {
            label: "T4 L=5 M=4 excited",
            model: open(5),
            template: "c,r,r,r",
            theta0: vec![3.1, 0.9, 0.5, 1.2, 2.4],
            statevector: vec![c(3.1421, 0.9027), c(0.5044, 0.0), c(1.1618, 0.0), c(2.4332, 0.0)],
            excited: true,
            tol: 2e-2,
        },
        Case {
            label: "T4 L=6 M=5 excited",
            model: open(6),
            template: "c,r,c,c,c",
            theta0: vec![3.1, 0.9, 0.67, 0.0, 0.3, 1.1, 0.16, 1.1, -0.16],
            statevector: vec![
                c(3.1412, 0.9156),
                c(0.6252, 0.0),
                c(0.0, 0.3029),
                c(1.1347, 0.1956),
                c(1.1347, -0.1956),
            ],
            excited: true,
            tol: 5e-2,
        },
    ];

    for case in cases {
        let template: RootTemplate = case.template.parse().unwrap();
        let m = template.num_roots();
        let cfg = OptimizerConfig::default();
        let start = Instant::now();
        let result = if case.excited {
            vqe_excited(&case.model, m, &template, EvaluatorKind::Exact, &case.theta0, &cfg, 7)
        } else {
            vqe_ground(&case.model, m, &template, EvaluatorKind::Exact, &case.theta0, &cfg, 7)
        };
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(r) => {
                let sv = RootVector { roots: case.statevector.clone(), boundary: case.model.boundary };
                let dist = max_orbit_distance(&r.roots, &sv);
                println!(
                    "{:<22} dist-to-sv {:8.2e} (tol {:.0e})  obj {:10.3e}  E {:10.6}  conv {}  evals {:4}  {:5.2}s  {}",
                    case.label,
                    dist,
                    case.tol,
                    r.final_objective,
                    r.energy,
                    r.converged,
                    r.evaluations,
                    elapsed,
                    if dist < case.tol { "OK" } else { "MISS" },
                );
                println!(
                    "    roots: {:?}",
                    r.roots
                        .roots
                        .iter()
                        .map(|k| format!("{:.5}{:+.5}i", k.re, k.im))
                        .collect::<Vec<_>>()
                );
            }
            Err(e) => println!("{:<22} FAILED: {e}", case.label),
        }
    }
}
