use selbound::bounds::{
    orlicz_bound, pnorm_conditional_bound, pnorm_marginal_bound, thm1_conditional_bound, thm1_marginal_bound,
    thm1_marginal_bound_at,
};
use selbound::oracle::MAX_GRID_RESOLUTION;
use selbound::{
    grid_minimize_bound, FiniteJointInstance, OracleInput, OracleObjective, OrliczSpec, SelectionMarginal,
};

fn symmetric_argmax() -> FiniteJointInstance {
    FiniteJointInstance::with_argmax(vec![vec![1.0, -1.0], vec![-1.0, 1.0]], vec![0.5, 0.5]).unwrap()
}

#[test]
fn two_point_argmax_conditional_matches_grid_and_closed_form() {
    let joint = symmetric_argmax();
    let spec = OrliczSpec::power(2.0).unwrap();
    let engine = thm1_conditional_bound(&joint, &spec, 1.0).unwrap().value.to_f64();
    // Each conditional is a fair indicator: min_a ‖X − a‖_2 = ½, two terms.
    assert!((engine - 1.0).abs() < 1e-6, "{engine}");
    let grid = grid_minimize_bound(
        OracleInput::Joint(&joint),
        OracleObjective::ConditionalAmemiya,
        &spec,
        1.0,
        MAX_GRID_RESOLUTION,
    )
    .unwrap();
    assert!((engine - grid.value).abs() <= grid.slack.max(1e-6), "{engine} vs {grid:?}");
    assert!(engine <= grid.value + 1e-9);
}

#[test]
fn two_point_pnorm_conditional_matches_grid_and_is_below_marginal() {
    let joint = symmetric_argmax();
    let engine = pnorm_conditional_bound(&joint, 2.0, 1.0).unwrap().value.to_f64();
    let spec = OrliczSpec::power(2.0).unwrap();
    let grid = grid_minimize_bound(
        OracleInput::Joint(&joint),
        OracleObjective::ConditionalPnorm,
        &spec,
        1.0,
        MAX_GRID_RESOLUTION,
    )
    .unwrap();
    assert!((engine - grid.value).abs() <= grid.slack.max(1e-6), "{engine} vs {grid:?}");
    let marginal = pnorm_marginal_bound(&joint.selection_marginal(), 2.0, 1.0).unwrap().value.to_f64();
    assert!(engine <= marginal + 1e-12);
    assert!((engine - 1.0).abs() < 1e-9);
}

#[test]
fn uniform_marginal_matches_grid_and_pnorm_specialization() {
    let m = SelectionMarginal::uniform(2).unwrap();
    let spec = OrliczSpec::power(2.0).unwrap();
    let engine = thm1_marginal_bound(&m, &spec, 1.0).unwrap().value.to_f64();
    let grid = grid_minimize_bound(
        OracleInput::Marginal(&m),
        OracleObjective::MarginalAmemiya,
        &spec,
        1.0,
        MAX_GRID_RESOLUTION,
    )
    .unwrap();
    assert!((engine - grid.value).abs() <= grid.slack.max(1e-6), "{engine} vs {grid:?}");
    let hq = pnorm_marginal_bound(&m, 2.0, 1.0).unwrap().value.to_f64();
    assert!((hq - 1.0).abs() < 1e-12);
    assert!((engine - hq).abs() < 1e-6, "{engine} vs {hq}");
}

#[test]
fn zero_shift_recovers_classical_bound_in_engine_and_grid() {
    for p in [1.5, 2.0, 3.0] {
        let spec = OrliczSpec::power(p).unwrap();
        for n in 1..=4 {
            let m = SelectionMarginal::uniform(n).unwrap();
            let classical = orlicz_bound(&spec, 1.0, n).unwrap().value.to_f64();
            let at_zero = thm1_marginal_bound_at(&m, &spec, 1.0, &vec![0.0; n]).unwrap().value.to_f64();
            assert!((at_zero - classical).abs() < 1e-8 * classical, "p={p} n={n}: {at_zero} vs {classical}");
            let grid = grid_minimize_bound(
                OracleInput::Marginal(&m),
                OracleObjective::MarginalAmemiya,
                &spec,
                1.0,
                MAX_GRID_RESOLUTION,
            )
            .unwrap();
            let column = grid.a_zero_value.unwrap();
            assert!(column >= classical - 1e-9 && column - classical < 1e-4 * classical, "{column} vs {classical}");
        }
    }
}

#[test]
fn deterministic_instances_are_zero_on_the_grid() {
    let joint = FiniteJointInstance::with_selection(
        vec![vec![1.0, -1.0, 0.5], vec![-1.0, 1.0, -0.5]],
        vec![0.5, 0.5],
        |_| vec![0.0, 0.0, 1.0],
    )
    .unwrap();
    let spec = OrliczSpec::power(2.0).unwrap();
    for objective in [
        OracleObjective::ConditionalAmemiya,
        OracleObjective::ConditionalPnorm,
        OracleObjective::MarginalAmemiya,
        OracleObjective::MarginalPnorm,
    ] {
        let grid = grid_minimize_bound(OracleInput::Joint(&joint), objective, &spec, 1.0, 501).unwrap();
        assert!(grid.value <= 1e-3, "{objective:?}: {}", grid.value);
    }
    assert_eq!(spec.generalized_inverse(3.0).unwrap(), 3f64.sqrt());
}

#[test]
fn instance_files_round_trip() {
    let joint = symmetric_argmax();
    let text = joint.to_text();
    let back: FiniteJointInstance = text.parse().unwrap();
    assert_eq!(back, joint);
    let bad = text.replace("0.5 0.5", "0.5 0.6");
    let err = bad.parse::<FiniteJointInstance>().unwrap_err().to_string();
    assert!(err.contains("line"), "{err}");
}
