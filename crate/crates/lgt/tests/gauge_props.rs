//! Gauge-side invariants beyond the unit tests: the action decomposition
//! over sub-boxes and the boundedness of lifted configurations.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lgt::gauge::{GaugeConfig, HermitianField};
use lgt::lattice::Lattice;
use lgt::unitary::gue_sample;

/// Restricts a configuration on `B_l` to a translate of `B_m` at `offset`.
fn restrict(cfg: &GaugeConfig, sub: &Arc<Lattice>, offset: &[i32]) -> GaugeConfig {
    let parent = cfg.lattice();
    let links = sub
        .edges()
        .iter()
        .map(|e| {
            let tail: Vec<i32> = e.tail.iter().zip(offset).map(|(a, b)| a + b).collect();
            let v = parent.vertex_index(&tail);
            let parent_edge = parent
                .edge_at(v, e.axis)
                .expect("translate edge lies inside the parent box");
            cfg.link(parent_edge).clone()
        })
        .collect();
    GaugeConfig::from_links(sub, links).unwrap()
}

#[test]
fn action_decomposes_over_disjoint_subboxes() {
    // 0 <= S(B_l) - Σ S(B_m translates) <= 2N · (straddling plaquettes).
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    for (m, k, order) in [(2usize, 2usize, 1usize), (2, 2, 2), (3, 2, 1)] {
        let l = m * k;
        let parent = Arc::new(Lattice::new(2, l).unwrap());
        let sub = Arc::new(Lattice::new(2, m).unwrap());
        for _ in 0..20 {
            let cfg = GaugeConfig::haar(&parent, order, &mut rng).unwrap();
            let full = cfg.wilson_action();
            let mut parts = 0.0;
            for bx in 0..k {
                for by in 0..k {
                    let offset = [(bx * m) as i32, (by * m) as i32];
                    parts += restrict(&cfg, &sub, &offset).wilson_action();
                }
            }
            let straddling =
                parent.plaquettes().len() as f64 - (k * k * sub.plaquettes().len()) as f64;
            let diff = full - parts;
            assert!(diff >= -1e-9, "negative gap {diff}");
            assert!(
                diff <= 2.0 * order as f64 * straddling + 1e-9,
                "gap {diff} over bound {}",
                2.0 * order as f64 * straddling
            );
        }
    }
}

#[test]
fn lifted_fields_stay_near_identity() {
    // ‖H(x,y)‖ <= r implies ‖I - e^{iH}‖ <= e^r r (Lipschitz bound with
    // H2 = 0).
    let mut rng = ChaCha8Rng::seed_from_u64(302);
    let lat = Arc::new(Lattice::new(2, 3).unwrap());
    let r = 0.1f64;
    for _ in 0..20 {
        let mats = (0..lat.free_edge_count())
            .map(|_| {
                let g = gue_sample(2, &mut rng).unwrap();
                g.scale(r / g.hs_norm())
            })
            .collect();
        let h = HermitianField::from_mats(&lat, mats).unwrap();
        let cfg = h.lift();
        for e in lat.edges() {
            let dist = cfg.link(e.index).as_matrix().hs_distance_to_identity();
            assert!(dist <= r.exp() * r + 1e-12, "edge {} at {dist}", e.index);
        }
    }
}
