use cage_core::experiments::SweepTable;
use cage_core::fdfd::{Polarization, SimulationConfig, SourceKind};
use cage_core::geometry::{topology_certificate_at, voxelize_layer_in, CellBox, DomainExtent};
use cage_core::io::{config_to_value, sweep_csv, write_outputs, SWEEP_COLUMNS};
use cage_core::{build_canonical_obstacle, parse_config, serialize_config, CanonicalObstacle, CaseId, Rational};
use num_complex::Complex64;
use proptest::prelude::*;

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn case_strategy() -> impl Strategy<Value = CaseId> {
    prop_oneof![Just(CaseId::DiscreteObstacle), Just(CaseId::ParallelWires), Just(CaseId::WireMesh)]
}

/// Boxes with corners on the 1/8 lattice of the unit cell.
fn box_strategy() -> impl Strategy<Value = CellBox> {
    let axis = |lo: i64, hi: i64| (lo..hi).prop_flat_map(move |a| (Just(a), (a + 1)..=hi));
    (axis(0, 8), axis(0, 8), axis(-4, 4)).prop_map(|((x0, x1), (y0, y1), (z0, z1))| {
        CellBox::new([r(x0, 8), r(y0, 8), r(z0, 8)], [r(x1, 8), r(y1, 8), r(z1, 8)])
    })
}

fn obstacle_strategy() -> impl Strategy<Value = CanonicalObstacle> {
    prop_oneof![
        case_strategy().prop_map(build_canonical_obstacle),
        prop::collection::vec(box_strategy(), 1..4).prop_map(|b| CanonicalObstacle::from_boxes(CaseId::DiscreteObstacle, b).unwrap()),
    ]
}

fn delta_strategy() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(r(1, 1)), Just(r(1, 2)), Just(r(1, 4)), Just(r(3, 8))]
}

/// Union volume by coordinate compression.
fn union_volume(boxes: &[CellBox]) -> Rational {
    let mut coords: [Vec<Rational>; 3] = Default::default();
    for b in boxes {
        for (a, c) in coords.iter_mut().enumerate() {
            c.push(b.lo[a]);
            c.push(b.hi[a]);
        }
    }
    for c in &mut coords {
        c.sort();
        c.dedup();
    }
    let mut total = r(0, 1);
    for x in coords[0].windows(2) {
        for y in coords[1].windows(2) {
            for z in coords[2].windows(2) {
                let centre = [(x[0] + x[1]) / 2, (y[0] + y[1]) / 2, (z[0] + z[1]) / 2];
                if boxes.iter().any(|b| (0..3).all(|a| b.lo[a] < centre[a] && centre[a] < b.hi[a])) {
                    total += (x[1] - x[0]) * (y[1] - y[0]) * (z[1] - z[0]);
                }
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refinement_keeps_the_coarse_mask(obstacle in obstacle_strategy(), delta in delta_strategy(), factor in 1usize..4) {
        let coarse_spacing = delta / 8;
        let fine_spacing = coarse_spacing / factor as i64;
        let extent = DomainExtent { periods: 1, half_height: delta };
        let coarse = voxelize_layer_in(&obstacle, delta, coarse_spacing, extent).unwrap();
        let fine = voxelize_layer_in(&obstacle, delta, fine_spacing, extent).unwrap();
        let (cl, fl) = (coarse.lattice, fine.lattice);
        prop_assert_eq!(fl.nz, factor * cl.nz);
        for k in 0..fl.nz {
            for j in 0..fl.ny {
                for i in 0..fl.nx {
                    prop_assert_eq!(
                        fine.pec_mask[fl.cell(i, j, k)],
                        coarse.pec_mask[cl.cell(i / factor, j / factor, k / factor)]
                    );
                }
            }
        }
    }

    #[test]
    fn mask_is_invariant_under_one_period_shift(obstacle in obstacle_strategy(), delta in delta_strategy(), along_x in any::<bool>()) {
        let extent = DomainExtent { periods: 2, half_height: delta / 2 };
        let layer = voxelize_layer_in(&obstacle, delta, delta / 16, extent).unwrap();
        let m = layer.cells_per_period;
        let shifted = if along_x { layer.translated(m, 0) } else { layer.translated(0, m) };
        prop_assert_eq!(&shifted.pec_mask, &layer.pec_mask);
        prop_assert_eq!(&shifted.edge_pec_mask, &layer.edge_pec_mask);
    }

    #[test]
    fn voxel_volume_is_exact(obstacle in obstacle_strategy(), delta in delta_strategy(), periods in 1usize..3, refine in 1i64..3) {
        let spacing = delta / (8 * refine);
        let extent = DomainExtent { periods, half_height: delta / 2 };
        let layer = voxelize_layer_in(&obstacle, delta, spacing, extent).unwrap();
        let measured = Rational::from_integer(layer.solid_voxels() as i64) * spacing * spacing * spacing;
        let p = periods as i64;
        let expected = union_volume(obstacle.boxes()) * delta * delta * delta * p * p;
        prop_assert_eq!(measured, expected);
        prop_assert_eq!(obstacle.volume(), union_volume(obstacle.boxes()));
    }

    #[test]
    fn certificate_does_not_depend_on_resolution(case in case_strategy(), a in 1i64..4, b in 1i64..4) {
        let obstacle = build_canonical_obstacle(case);
        prop_assert_eq!(topology_certificate_at(&obstacle, 8 * a), topology_certificate_at(&obstacle, 8 * b));
    }

    #[test]
    fn config_survives_a_round_trip(
        case in prop::option::of(case_strategy()),
        delta_den in 1i64..5,
        refine in 1i64..3,
        omega in 0.5f64..20.0,
        eps_re in 0.1f64..4.0,
        eps_im in 0.01f64..4.0,
        e2 in any::<bool>(),
        dipole in any::<bool>(),
        amp_re in -2.0f64..2.0,
        amp_im in -2.0f64..2.0,
        tol in 1e-12f64..1e-6,
        periods in 1usize..3,
    ) {
        let delta = r(1, delta_den);
        let mut c = SimulationConfig::new(case, delta);
        c.omega = omega;
        c.epsilon = Complex64::new(eps_re, eps_im);
        c.spacing = delta / (8 * refine);
        c.x3 = r(3, 1);
        c.source.a = c.spacing * (8 * refine + 3);
        c.d = c.source.a;
        c.source.polarization = if e2 { Polarization::E2 } else { Polarization::E1 };
        c.source.kind = if dipole { SourceKind::Dipole } else { SourceKind::CurrentSheet };
        c.source.amplitude = Complex64::new(amp_re, amp_im);
        c.tolerance = tol;
        c.periods = periods;
        prop_assume!(c.validate().is_ok());
        let text = serialize_config(&c);
        prop_assert_eq!(parse_config(&text).unwrap(), c);
    }
}

#[test]
fn examples_from_the_schema() {
    let ok = r#"{"epsilon":[1,1],"omega":6.2831853,"delta":"1/4","case":"mesh","spacing":"1/32",
        "X3":"21/4","source":{"type":"CurrentSheet","a":"5/16","pol":"e1","amp":[1,0]},"tol":1e-8}"#;
    let c = parse_config(ok).unwrap();
    assert_eq!(c.case, Some(CaseId::WireMesh));
    assert_eq!(c.spacing, r(1, 32));

    let lossless = ok.replace("[1,1]", "[1,0]");
    assert!(matches!(parse_config(&lossless), Err(cage_core::Error::InvalidEpsilon { .. })));

    let misaligned = ok.replace("\"1/4\"", "\"1/3\"").replace("\"1/32\"", "\"1/10\"");
    assert!(matches!(parse_config(&misaligned), Err(cage_core::Error::SpacingMisaligned { .. })));

    let missing = ok.replace("\"omega\":6.2831853,", "");
    match parse_config(&missing) {
        Err(cage_core::Error::Schema { field, .. }) => assert_eq!(field, "omega"),
        other => panic!("expected a schema error, got {other:?}"),
    }
    let bad_pol = ok.replace("\"e1\"", "\"e3\"");
    match parse_config(&bad_pol) {
        Err(cage_core::Error::Schema { field, .. }) => assert_eq!(field, "source.pol"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn empty_table_writes_header_only_and_a_valid_manifest() {
    let csv = sweep_csv(&SweepTable::default());
    assert_eq!(csv, format!("{SWEEP_COLUMNS}\n"));
    let dir = tempfile::tempdir().unwrap();
    let input = config_to_value(&SimulationConfig::new(Some(CaseId::WireMesh), r(1, 2)));
    let manifest = write_outputs(dir.path(), &input, &[("sweep.csv".into(), csv.clone().into_bytes())]).unwrap();
    assert_eq!(manifest.outputs.len(), 1);
    let on_disk: cage_core::RunManifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, manifest);
    assert_eq!(std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap(), csv);
}

#[test]
fn identical_inputs_give_identical_digests() {
    let input = config_to_value(&SimulationConfig::new(None, r(1, 2)));
    let files = vec![("a/report.csv".to_string(), b"x,y\n1,2\n".to_vec()), ("b.vtk".to_string(), b"# vtk\n".to_vec())];
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let m1 = write_outputs(d1.path(), &input, &files).unwrap();
    let m2 = write_outputs(d2.path(), &input, &files).unwrap();
    assert_eq!(m1.outputs, m2.outputs);
    assert_eq!(m1.config_hash, m2.config_hash);
    assert_eq!(m1.outputs[0].sha256, "81bf9fa83c6f7f151bd491a98cd7d933de3965289e3ebd77c6c425f7eaa16392");
}
