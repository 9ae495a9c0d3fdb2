//! Scratch driver used while developing; sweeps the reference table
//! rows through Newton refinement, eigen-residual checks, and the
//! log-form quantum-number derivation.

use bethe_vqe_core::bethe::{bethe_state, energy_closed, energy_open, RootVector};
use bethe_vqe_core::betheq::{
    iterate_log_closed, newton_solve, residual_closed, NewtonOptions,
};
use bethe_vqe_core::exact::{eigen_residual, eigenvalues};
use bethe_vqe_core::model::{Boundary, ChainModel};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Row {
    label: &'static str,
    model: ChainModel,
    roots: Vec<Complex64>,
    energy: f64,
}

fn rows() -> Vec<Row> {
    let closed = |l: usize| ChainModel::closed(l, 2.0).unwrap();
    let open = |l: usize| ChainModel::open(l, 0.5, 3.0, 0.3).unwrap();
    vec![
        // Table 1: closed ground states, Δ = 2.
        Row { label: "T1 L=2 M=1", model: closed(2), roots: vec![c(3.14159, 0.0)], energy: -2.0 },
        Row {
            label: "T1 L=4 M=2",
            model: closed(4),
            roots: vec![c(1.94553, 0.0), c(-1.94553, 0.0)],
            energy: -2.73205,
        },
        Row {
            label: "T1 L=6 M=3",
            model: closed(6),
            roots: vec![c(1.49862, 0.0), c(-1.49862, 0.0), c(3.14159, 0.0)],
            energy: -3.85577,
        },
        // Table 2: open ground states, Δ = 1/2, h = 3, h' = 0.3.
        Row { label: "T2 L=2 M=1", model: open(2), roots: vec![c(3.14159, 0.882174)], energy: -0.965015 },
        Row {
            label: "T2 L=3 M=2",
            model: open(3),
            roots: vec![c(3.14159, 0.908996), c(1.69883, 0.0)],
            energy: -1.49506,
        },
        Row {
            label: "T2 L=4 M=2",
            model: open(4),
            roots: vec![c(3.14159, 0.91503), c(2.11689, 0.0)],
            energy: -1.76803,
        },
        Row {
            label: "T2 L=5 M=3",
            model: open(5),
            roots: vec![c(3.14159, 0.916011), c(1.49569, 0.0), c(2.31576, 0.0)],
            energy: -2.22762,
        },
        Row {
            label: "T2 L=6 M=3",
            model: open(6),
            roots: vec![c(3.14159, 0.916239), c(1.82675, 0.0), c(2.47141, 0.0)],
            energy: -2.53682,
        },
        // Table 3: closed excited states, Δ = 2.
        Row { label: "T3 L=2 M=1", model: closed(2), roots: vec![c(0.0, 0.0)], energy: 0.0 },
        Row { label: "T3 L=3 M=1", model: closed(3), roots: vec![c(2.0944, 0.0)], energy: -1.0 },
        Row {
            label: "T3 L=4 M=2",
            model: closed(4),
            roots: vec![c(0.0, 0.831443), c(0.0, -0.831443)],
            energy: 0.732051,
        },
        Row {
            label: "T3 L=5 M=2",
            model: closed(5),
            roots: vec![c(0.628319, 0.835459), c(0.628319, -0.835459)],
            energy: 0.716341,
        },
        Row {
            label: "T3 L=6 M=2",
            model: closed(6),
            roots: vec![c(1.37766, 0.0), c(2.81114, 0.0)],
            energy: -1.75395,
        },
        Row {
            label: "T3 L=6 M=3",
            model: closed(6),
            roots: vec![c(0.244998, 1.41247), c(0.244998, -1.41247), c(1.6044, 0.0)],
            energy: 1.18614,
        },
        // Table 4: open excited states.
        Row { label: "T4 L=2 M=1", model: open(2), roots: vec![c(1.30258, 0.0)], energy: 0.715015 },
        Row { label: "T4 L=3 M=1", model: open(3), roots: vec![c(3.14159, 0.911371)], energy: -0.869852 },
        Row {
            label: "T4 L=4 M=2",
            model: open(4),
            roots: vec![c(3.14159, 0.916221), c(0.0, 0.2264)],
            energy: -0.224189,
        },
        Row {
            label: "T4 L=4 M=3",
            model: open(4),
            roots: vec![c(3.14159, 0.916237), c(0.93789, 0.0), c(0.0, 0.245389)],
            energy: -0.128194,
        },
        Row {
            label: "T4 L=5 M=4",
            model: open(5),
            roots: vec![
                c(3.14159, 0.916185),
                c(0.514675, 0.0),
                c(1.16211, 0.0),
                c(2.43263, 0.0),
            ],
            energy: -1.61607,
        },
        Row {
            label: "T4 L=6 M=5",
            model: open(6),
            roots: vec![
                c(3.14159, 0.916291),
                c(0.667057, 0.0),
                c(0.0, 0.32195),
                c(1.12044, 0.160175),
                c(1.12044, -0.160175),
            ],
            energy: 0.21968,
        },
    ]
}

fn main() {
    println!("== table rows: newton refinement + eigen residual ==");
    for row in rows() {
        let m = row.roots.len();
        let guess = RootVector { roots: row.roots.clone(), boundary: row.model.boundary };
        let refined = match newton_solve(&row.model, m, &guess, &NewtonOptions::default()) {
            Ok(r) => r,
            Err(e) => {
                println!("{:<12} NEWTON FAILED: {e}", row.label);
                continue;
            }
        };
        let state = bethe_state(&row.model, &refined).unwrap();
        let h = row.model.hamiltonian();
        let resid = eigen_residual(&state, &h).unwrap();
        let e = match row.model.boundary {
            Boundary::Closed => energy_closed(&refined.roots, row.model.l, row.model.delta),
            Boundary::Open => energy_open(&refined.roots, &row.model),
        };
        let spec = eigenvalues(&row.model, m).unwrap();
        let nearest = spec
            .eigenvalues
            .iter()
            .map(|ev| (ev - e.re).abs())
            .fold(f64::INFINITY, f64::min);
        let printed_diff = (e.re - row.energy).abs();
        println!(
            "{:<12} eig_resid {:9.2e}  E {:>12.7}  |Im E| {:7.1e}  vs printed {:7.1e}  vs sector {:7.1e}  roots {:?}",
            row.label,
            resid,
            e.re,
            e.im.abs(),
            printed_diff,
            nearest,
            refined
                .roots
                .iter()
                .map(|k| format!("{:.6}{:+.6}i", k.re, k.im))
                .collect::<Vec<_>>()
        );
    }

    println!("\n== quantum-number derivation for the closed ground sector ==");
    let seeds: Vec<(usize, Vec<Complex64>)> = vec![
        (2, vec![c(3.14159, 0.0)]),
        (4, vec![c(-1.94553, 0.0), c(1.94553, 0.0)]),
        (6, vec![c(-1.49862, 0.0), c(1.49862, 0.0), c(3.14159, 0.0)]),
    ];
    for (l, seed) in seeds {
        let m = l / 2;
        let model = ChainModel::closed(l, 2.0).unwrap();
        let refined =
            newton_solve(&model, m, &RootVector::closed(seed), &NewtonOptions::default())
                .unwrap();
        let e = energy_closed(&refined.roots, l, 2.0);
        let e0 = eigenvalues(&model, m).unwrap().eigenvalues[0];
        // Back out the quantum numbers at the solution (principal branch).
        let i_vals: Vec<f64> = (0..m)
            .map(|j| {
                let mut sum = 0.0;
                for lidx in 0..m {
                    if lidx == j {
                        continue;
                    }
                    let ratio = -bethe_vqe_core::bethe::kernel_s(
                        refined.roots[lidx],
                        refined.roots[j],
                        2.0,
                    ) / bethe_vqe_core::bethe::kernel_s(
                        refined.roots[j],
                        refined.roots[lidx],
                        2.0,
                    );
                    sum += ratio.ln().im;
                }
                (l as f64 * refined.roots[j].re - sum) / (2.0 * PI)
            })
            .collect();
        println!(
            "L={l}: roots {:?}\n      E = {:.8} (sector min {:.8}, diff {:.1e}), I = {:?}",
            refined.roots.iter().map(|k| format!("{:.6}", k.re)).collect::<Vec<_>>(),
            e.re,
            e0,
            (e.re - e0).abs(),
            i_vals.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        );
        // Round and feed back into the log iteration.
        let rounded: Vec<f64> = i_vals.iter().map(|v| (2.0 * v).round() / 2.0).collect();
        match iterate_log_closed(l, m, 2.0, &rounded) {
            Ok(iter_roots) => {
                let max_diff = iter_roots
                    .roots
                    .iter()
                    .zip(refined.roots.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                println!("      log iteration with I = {rounded:?}: max diff {max_diff:.2e}");
            }
            Err(e) => println!("      log iteration failed: {e}"),
        }
        let r = residual_closed(&refined, l, 2.0);
        println!("      residual {:.2e}", r.max_norm());
    }

    println!("\n== log iteration alone on candidate ladders, L = 8..12 ==");
    for l in [8usize, 10, 12] {
        let m = l / 2;
        let model = ChainModel::closed(l, 2.0).unwrap();
        let e0 = eigenvalues(&model, m).unwrap().eigenvalues[0];
        for (label, numbers) in [
            (
                "odd-ladder",
                (0..m).map(|j| (2 * j as i64 - (m as i64 - 2)) as f64).collect::<Vec<f64>>(),
            ),
            (
                "even-ladder",
                (0..m).map(|j| (2 * j as i64 - (m as i64 - 1)) as f64).collect::<Vec<f64>>(),
            ),
        ] {
            match iterate_log_closed(l, m, 2.0, &numbers) {
                Ok(roots) => {
                    let e = energy_closed(&roots.roots, l, 2.0);
                    let r = residual_closed(&roots, l, 2.0);
                    println!(
                        "L={l} {label} I={numbers:?}: E = {:.8} (ground {:.8}, diff {:.1e}), resid {:.1e}",
                        e.re,
                        e0,
                        (e.re - e0).abs(),
                        r.max_norm()
                    );
                }
                Err(e) => println!("L={l} {label} I={numbers:?}: failed: {e}"),
            }
        }
    }
}
