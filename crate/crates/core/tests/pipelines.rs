use approx::{assert_abs_diff_eq, assert_relative_eq};
use torus_inflation::constructions::{appendix_profile, build_two_block_data, Regime};
use torus_inflation::inflation_lab::config::{DataKind, InflateSection, Sweep};
use torus_inflation::inflation_lab::{
    emit_report, render, run_experiment, EvolutionMethod, Experiment, ExperimentConfig, Format, CSV_COLUMNS,
};
use torus_inflation::profile::{periodize, ProfileKind};
use torus_inflation::spectral::{fourier_lebesgue_norm, synthesize};

fn small_inflate() -> ExperimentConfig {
    let mut c = ExperimentConfig::default_for(Experiment::Inflate);
    c.sweep = Some(Sweep { values: vec![64.0, 128.0, 256.0] });
    c
}

#[test]
fn inflate_pipeline_reports_every_row() {
    let rep = run_experiment(&small_inflate(), Some(2)).unwrap();
    assert_eq!(rep.rows.len(), 3);
    for r in &rep.rows {
        let q = r.method_disagreement.unwrap();
        assert!(q < 1.0, "{q}");
        assert!(r.ratio.unwrap() > 1.0);
        assert!(r.extras.contains_key("diff_ode_picard"));
    }
    assert_eq!(rep.summary["ratio_strictly_increasing"], 1.0);
}

#[test]
fn two_block_sup_norm_is_r() {
    for regime in [Regime::CritHalf, Regime::FracCrit] {
        let tb = build_two_block_data(regime, 512, -1.0, 0.1).unwrap();
        let f = tb.torus_field().unwrap();
        assert_relative_eq!(fourier_lebesgue_norm(&f, 0.0, f64::INFINITY).unwrap(), tb.r, max_relative = 1e-15);
        assert!(f.coeffs().iter().all(|z| z.im == 0.0 && z.re >= 0.0));
    }
}

#[test]
fn zero_data_through_the_pipeline() {
    let mut c = small_inflate();
    c.inflate = Some(InflateSection {
        data: DataKind::Zero,
        methods: vec![EvolutionMethod::Ode, EvolutionMethod::SplitStep],
        ..Default::default()
    });
    let rep = run_experiment(&c, None).unwrap();
    for r in &rep.rows {
        assert_eq!(r.norm_t0, Some(0.0));
        assert!(r.ratio.is_none());
    }
}

#[test]
fn config_round_trips_through_toml_and_json() {
    for e in [Experiment::Inflate, Experiment::Approx, Experiment::Periodize, Experiment::Gamma, Experiment::Feasibility] {
        let c = ExperimentConfig::default_for(e);
        assert_eq!(ExperimentConfig::parse(&c.to_toml().unwrap()).unwrap(), c);
    }
    let mut c = ExperimentConfig::default_for(Experiment::Feasibility);
    c.sweep = Some(Sweep { values: vec![1e4, 1e5] });
    let rep = run_experiment(&c, Some(1)).unwrap();
    let json = String::from_utf8(render(&rep, Format::Json).unwrap()).unwrap();
    assert_eq!(ExperimentConfig::parse(&json).unwrap(), c);
}

#[test]
fn config_rejects_unknown_keys_and_bad_sweeps() {
    assert!(ExperimentConfig::parse("experiment = \"periodize\"\nbogus = 1\n").is_err());
    assert!(ExperimentConfig::parse("experiment = \"periodize\"\n[sweep]\nvalues = [16.0, 8.0]\n").and_then(|c| c.validate()).is_err());
    let foreign = "experiment = \"periodize\"\n[gamma]\nj = 2\n";
    assert!(ExperimentConfig::parse(foreign).map(|c| c.validate()).map_or(true, |r| r.is_err()));
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let c = small_inflate();
    let a = render(&run_experiment(&c, Some(1)).unwrap(), Format::Json).unwrap();
    let b = render(&run_experiment(&c, Some(3)).unwrap(), Format::Json).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_file_has_fixed_columns() {
    let dir = std::env::temp_dir().join(format!("inflation-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.csv");
    let rep = run_experiment(&ExperimentConfig::default_for(Experiment::Feasibility), None).unwrap();
    emit_report(&rep, Format::Csv, Some(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(lines.count(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn periodization_restricts_to_the_profile() {
    let p = appendix_profile(ProfileKind::Derivative, 1).unwrap().centered();
    let l = 16.0;
    let f = periodize(&p, l, 512).unwrap();
    let g = 2048;
    let samples = synthesize(&f, g).unwrap();
    for (j, z) in samples.iter().enumerate() {
        let x = j as f64 * l / g as f64 - l / 2.0;
        assert_abs_diff_eq!(z.re, p.value(x), epsilon = 1e-8);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-8);
    }
}

#[test]
fn short_period_is_refused() {
    let p = appendix_profile(ProfileKind::Derivative, 1).unwrap().centered();
    assert!(periodize(&p, 4.0, 16).is_err());
}
