use num_complex::Complex64;
use proptest::prelude::*;
use wavefield_core::channel::taps_to_frequency;
use wavefield_core::dataset::{Dataset, DatasetHeader, Split};
use wavefield_core::dictionary::{assemble_channel, assemble_channel_kronecker, rotation, rotation_equivariance_check, DictionaryBank};
use wavefield_core::omp::{omp_decompose, residual_correlations};
use wavefield_core::{
    channel_response, enumerate_paths, impulse_response, AntennaArray, ChannelMatrix, FrequencyGrid, Location, Scene,
    SPEED_OF_LIGHT,
};

const F_R: f64 = 3.5e9;

fn loc() -> impl Strategy<Value = Location> {
    (-1.99f64..1.99, -1.99f64..1.99).prop_map(|(x, y)| Location::new(x, y))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn bank(na: usize, ns: usize, d: usize) -> DictionaryBank {
    let array = AntennaArray::ula(na, Location::new(0.0, -3.0), SPEED_OF_LIGHT / F_R).unwrap();
    let grid = FrequencyGrid::uniform(F_R, 50e6, ns).unwrap();
    DictionaryBank::build(&array, &grid, d, (0.0, 1e-7)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn atoms_are_unit_modulus(na in 1usize..9, ns in 1usize..9, d in 1usize..40, x in loc()) {
        let b = bank(na, ns, d);
        for z in b.steering.data().iter().chain(b.frequency.data()).chain(&b.planar_wavefronts(x)) {
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kronecker_identity(w in prop::collection::vec(complex(), 10), x in loc()) {
        let b = bank(3, 4, 10);
        let a = assemble_channel(&w, x, &b).unwrap();
        let k = assemble_channel_kronecker(&w, x, &b).unwrap();
        prop_assert!(a.distance_sq(&k).sqrt() <= 1e-12 * a.frobenius_norm().max(1e-300));
    }

    #[test]
    fn assembly_is_linear_in_weights(w in prop::collection::vec(complex(), 12), x in loc()) {
        let b = bank(4, 3, 12);
        let h = assemble_channel(&w, x, &b).unwrap();
        let doubled: Vec<Complex64> = w.iter().map(|z| z * 2.0).collect();
        let h2 = assemble_channel(&doubled, x, &b).unwrap();
        for (a, c) in h.entries().iter().zip(h2.entries()) {
            prop_assert!((a * 2.0 - c).norm() <= 1e-14 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn rotation_identity(theta in 0.0f64..6.3, phi in 0.0f64..6.3, dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let ok = rotation_equivariance_check(Location::from_angle(phi), &rotation(theta), &[Location::new(dx, dy)]).unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn street_channel_properties(x in loc(), phase in 0.0f64..std::f64::consts::TAU) {
        let scene = Scene::preset("street", 3, F_R).unwrap();
        let grid = FrequencyGrid::uniform(F_R, 50e6, 6).unwrap();
        let mut paths = enumerate_paths(&scene, x).unwrap();
        let h = channel_response(&paths, x, &grid).unwrap();
        prop_assert!(h.is_finite());
        prop_assert!(h.frobenius_norm() > 0.0);
        for j in 0..3 {
            for p in paths.antenna(j) {
                prop_assert!(p.gamma.norm() <= 1.0 + 1e-15);
                let folded = p.folded_length(scene.array.element(j), x);
                prop_assert!((folded - p.virtual_source.distance(x)).abs() <= 1e-9 * folded);
            }
            let row = taps_to_frequency(&impulse_response(&paths, x, j).unwrap(), grid.frequencies());
            let err: f64 = row.iter().zip(h.row(j)).map(|(a, b)| (a - b).norm_sqr()).sum();
            prop_assert!(err.sqrt() <= 1e-10 * h.frobenius_norm());
        }
        paths.scale_gains(Complex64::from_polar(1.0, phase));
        let rotated = channel_response(&paths, x, &grid).unwrap();
        for (a, b) in h.entries().iter().zip(rotated.entries()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-13 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn omp_residual_is_monotone_and_orthogonal(entries in prop::collection::vec(complex(), 16), x in loc(), k in 1usize..8) {
        let b = bank(4, 4, 24);
        let h = ChannelMatrix::from_entries(4, 4, entries, x).unwrap();
        let sol = omp_decompose(&h, x, &b, k).unwrap();
        prop_assert!(sol.support.len() <= k);
        let mut prev = h.frobenius_norm();
        for &r in &sol.residual_history {
            prop_assert!(r < prev);
            prev = r;
        }
        for c in residual_correlations(&h, x, &b, &sol).unwrap() {
            prop_assert!(c.norm() < 1e-9);
        }
    }

    #[test]
    fn dataset_round_trip(points in prop::collection::vec((loc(), prop::collection::vec(complex(), 6)), 0..20), seed in any::<u64>()) {
        let records: Vec<ChannelMatrix> = points
            .into_iter()
            .map(|(x, e)| ChannelMatrix::from_entries(2, 3, e, x).unwrap())
            .collect();
        let header = DatasetHeader {
            antennas: 2,
            frequencies: 3,
            reference_frequency: F_R,
            bandwidth: 50e6,
            scene_id: "prop".into(),
            side: 4.0,
            seed,
            split: Split::Test,
            count: 0,
        };
        let data = Dataset::new(header, records).unwrap();
        let back = Dataset::from_bytes(&data.to_bytes()).unwrap();
        prop_assert_eq!(back, data);
    }

    #[test]
    fn test_grid_count_formula(side in 0.1f64..3.0, spacing in 0.05f64..0.7) {
        let g = wavefield_core::dataset::build_test_grid(side, spacing).unwrap();
        let n = (side / spacing).floor() as usize + 1;
        // Exact multiples may land on either side of the floor.
        prop_assert!(g.len() == n * n || g.len() == (n + 1) * (n + 1));
        prop_assert!(g.iter().all(|p| p.x <= side / 2.0 + 1e-9 && p.y <= side / 2.0 + 1e-9));
    }
}
