use extraboard::datagen::{sample_desk_instance, sample_tiny_instance};
use extraboard::formulation::{
    build_extensive_form, greedy_first_stage, strengthen_extensive_form, warm_start_values,
    FormulationConfig, ScenarioMode,
};
use extraboard::milp::{solve_lp, solve_milp, solve_milp_warm, SolveParams};
use extraboard::recourse::enumerate_first_stage;
use std::time::Instant;

#[test]
fn probe_vss_instances() {
    let p = SolveParams { gap_tol: 0.0, max_nodes: 300_000, ..SolveParams::default() };
    let instance = sample_tiny_instance(88, 0);
    let variant = instance.absence.variant;
    let full = FormulationConfig { variant, scenario_mode: ScenarioMode::Full };
    let (model, index) = build_extensive_form(&instance, &full).unwrap();
    let strong = strengthen_extensive_form(&instance, &full, &model, &index, &p).unwrap();
    eprintln!(
        "cols={} rows={} -> cols={} rows={}",
        model.num_vars(),
        model.num_rows(),
        strong.model.num_vars(),
        strong.model.num_rows()
    );

    let lp = solve_lp(&strong.model, &p).unwrap();
    eprintln!("root LP {:?} obj={:.4}", lp.status, lp.objective);

    let enumerated = enumerate_first_stage(&instance, &p).unwrap();
    eprintln!("enumeration best: {:?}", enumerated.best);

    let greedy = greedy_first_stage(&instance, variant);
    let warm = warm_start_values(&instance, &full, &index, &greedy.assignment, &p).map(|mut w| {
        strong.extend_warm(&index, &mut w.values);
        w
    });

    let t1 = Instant::now();
    let cold = solve_milp(&strong.model, &p).unwrap();
    eprintln!(
        "cold: {:?} obj={:?} bound={} gap={:?} nodes={} iters={} in {:.2}s",
        cold.status,
        cold.objective,
        cold.best_bound,
        cold.gap,
        cold.nodes,
        cold.lp_iterations,
        t1.elapsed().as_secs_f64()
    );
    if let Some(w) = &warm {
        let t2 = Instant::now();
        let ws = solve_milp_warm(&strong.model, &p, w);
        match ws {
            Ok(sol) => eprintln!(
                "warm: {:?} obj={:?} bound={} nodes={} in {:.2}s",
                sol.status,
                sol.objective,
                sol.best_bound,
                sol.nodes,
                t2.elapsed().as_secs_f64()
            ),
            Err(e) => eprintln!("warm err: {e}"),
        }
    }
}

#[test]
fn probe_desk_instances() {
    let p = SolveParams { gap_tol: 0.01, ..SolveParams::default() };
    for idx in 0..4u64 {
        let instance = sample_desk_instance(7, idx);
        let variant = instance.absence.variant;
        let full = FormulationConfig { variant, scenario_mode: ScenarioMode::Full };
        let (model, index) = build_extensive_form(&instance, &full).unwrap();
        let t0 = Instant::now();
        let strong = strengthen_extensive_form(&instance, &full, &model, &index, &p).unwrap();
        let t_strong = t0.elapsed().as_secs_f64();
        let greedy = greedy_first_stage(&instance, variant);
        let warm =
            warm_start_values(&instance, &full, &index, &greedy.assignment, &p).map(|mut w| {
                strong.extend_warm(&index, &mut w.values);
                w
            });
        let t1 = Instant::now();
        let sol = match &warm {
            Some(w) => solve_milp_warm(&strong.model, &p, w).unwrap(),
            None => solve_milp(&strong.model, &p).unwrap(),
        };
        eprintln!(
            "desk {idx}: E={} T={} W={} cols={} rows={} strong={t_strong:.2}s {:?} obj={:?} gap={:?} nodes={} in {:.2}s",
            instance.num_employees,
            instance.num_periods(),
            instance.duties.len(),
            strong.model.num_vars(),
            strong.model.num_rows(),
            sol.status,
            sol.objective,
            sol.gap,
            sol.nodes,
            t1.elapsed().as_secs_f64()
        );
    }
}
