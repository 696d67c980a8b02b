//! Batch comparability studies: run the battery, the extremizer and
//! optionally the corona certificate over a list of specs, and aggregate the
//! ratios c1 / c2.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corona::verify_corona_certificate;
use crate::extremizer::{estimate_c1_with, DEFAULT_MAX_SWEEPS, DEFAULT_RESTARTS, DEFAULT_TOL};
use crate::instance::{generate_instance, seeded_functions, InstanceSpec};
use crate::measure::GridFunction;
use crate::testing::{theorem_battery, ConditionReportDoc};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyOptions {
    pub restarts: u32,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Extra seed for the extremizer and the certificate functions.
    pub seed: u64,
    /// Also replay the corona certificate with seeded random functions.
    pub certify: bool,
    /// Treat per-instance failures as study failures.
    pub strict: bool,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            seed: 0,
            certify: false,
            strict: false,
            ratio_min: None,
            ratio_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub c2: Option<f64>,
    /// Full battery breakdown (absent when generation failed).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<ConditionReportDoc>,
    pub c1_estimate: Option<f64>,
    pub ratio: Option<f64>,
    /// c2 = 0: excluded from the aggregates.
    pub zero_instance: bool,
    pub infeasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyAggregate {
    pub evaluated: usize,
    pub excluded_zero: usize,
    pub infeasible: usize,
    pub failed: usize,
    pub ratio_min: Option<f64>,
    pub ratio_median: Option<f64>,
    pub ratio_max: Option<f64>,
    /// Indices of the instances attaining the extreme ratios.
    pub worst_low: Option<usize>,
    pub worst_high: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyReport {
    pub records: Vec<InstanceRecord>,
    pub aggregate: StudyAggregate,
    pub thresholds_met: bool,
}

fn run_one(index: usize, spec: &InstanceSpec, options: &StudyOptions) -> InstanceRecord {
    let mut record = InstanceRecord {
        index,
        c2: None,
        battery: None,
        c1_estimate: None,
        ratio: None,
        zero_instance: false,
        infeasible: false,
        certificate_pass: None,
        error: None,
    };
    let inst = match generate_instance(spec) {
        Ok(inst) => inst,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let battery = theorem_battery(&inst);
    record.infeasible = battery.infeasible;
    record.c2 = battery.c2.is_finite().then_some(battery.c2);
    record.battery = Some(battery.to_doc(inst.tree()));
    if battery.infeasible {
        return record;
    }
    let est = match estimate_c1_with(
        &inst,
        options.restarts,
        options.seed ^ index as u64,
        options.max_sweeps,
        options.tol,
    ) {
        Ok(e) => e,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.c1_estimate = Some(est.c1_estimate);
    if battery.c2 == 0.0 {
        record.zero_instance = true;
        if est.c1_estimate != 0.0 {
            record.error = Some(format!(
                "zero-instance policy violated: c2 = 0 but c1 estimate = {}",
                est.c1_estimate
            ));
        }
    } else {
        record.ratio = Some(est.c1_estimate / battery.c2);
    }
    if options.certify {
        let fs: [GridFunction; 3] =
            seeded_functions(inst.tree(), options.seed ^ (index as u64).rotate_left(17));
        match verify_corona_certificate(&inst, &fs, battery.c2) {
            Ok(cert) => record.certificate_pass = Some(cert.pass),
            Err(e) => record.error = Some(e.to_string()),
        }
    }
    record
}

/// Runs the study over the given specs. Instances evaluate concurrently;
/// records are ordered by spec index, so the report is a pure function of
/// (specs, options).
pub fn run_study(specs: &[InstanceSpec], options: &StudyOptions) -> StudyReport {
    let records: Vec<InstanceRecord> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| run_one(i, spec, options))
        .collect();

    let mut ratios: Vec<(f64, usize)> = records
        .iter()
        .filter_map(|r| r.ratio.map(|x| (x, r.index)))
        .collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let aggregate = StudyAggregate {
        evaluated: records.len(),
        excluded_zero: records.iter().filter(|r| r.zero_instance).count(),
        infeasible: records.iter().filter(|r| r.infeasible).count(),
        failed: records.iter().filter(|r| r.error.is_some()).count(),
        ratio_min: ratios.first().map(|(x, _)| *x),
        ratio_median: (!ratios.is_empty()).then(|| ratios[ratios.len() / 2].0),
        ratio_max: ratios.last().map(|(x, _)| *x),
        worst_low: ratios.first().map(|(_, i)| *i),
        worst_high: ratios.last().map(|(_, i)| *i),
    };

    let mut thresholds_met = true;
    for (x, _) in &ratios {
        if let Some(lo) = options.ratio_min {
            if *x < lo {
                thresholds_met = false;
            }
        }
        if let Some(hi) = options.ratio_max {
            if *x > hi {
                thresholds_met = false;
            }
        }
    }
    if options.strict {
        let clean = records
            .iter()
            .all(|r| r.error.is_none() && r.certificate_pass != Some(false));
        thresholds_met = thresholds_met && clean;
    }

    StudyReport {
        records,
        aggregate,
        thresholds_met,
    }
}

impl StudyReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{KernelSpec, MeasureSpec};
    use approx::assert_relative_eq;

    #[test]
    fn empty_study_is_empty_and_passes() {
        let report = run_study(&[], &StudyOptions::default());
        assert!(report.records.is_empty());
        assert!(report.thresholds_met);
        assert_eq!(report.aggregate.evaluated, 0);
    }

    #[test]
    fn single_cube_ratio_is_exactly_one() {
        let spec = InstanceSpec {
            version: 1,
            n: 1,
            depth: 0,
            p: [2.0, 2.0, 2.0],
            kernel: KernelSpec::Explicit { values: vec![1.4] },
            measures: [
                MeasureSpec::Explicit { values: vec![2.0] },
                MeasureSpec::Explicit { values: vec![3.0] },
                MeasureSpec::Explicit { values: vec![5.0] },
            ],
            seed: 0,
        };
        let report = run_study(&[spec], &StudyOptions::default());
        let ratio = report.records[0].ratio.unwrap();
        assert_relative_eq!(ratio, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn zero_instances_are_excluded_and_checked() {
        let spec = InstanceSpec {
            version: 1,
            n: 1,
            depth: 1,
            p: [2.0, 2.0, 2.0],
            kernel: KernelSpec::Explicit {
                values: vec![0.0, 0.0, 0.0],
            },
            measures: [
                MeasureSpec::Uniform { seed: None },
                MeasureSpec::Uniform { seed: None },
                MeasureSpec::Uniform { seed: None },
            ],
            seed: 3,
        };
        let report = run_study(&[spec], &StudyOptions::default());
        let r = &report.records[0];
        assert!(r.zero_instance);
        assert_eq!(r.ratio, None);
        assert_eq!(r.error, None);
        assert_eq!(report.aggregate.excluded_zero, 1);
    }

    #[test]
    fn report_round_trip_is_byte_identical() {
        let specs = vec![InstanceSpec::random(1, 2, [2.0, 2.0, 2.0], 3)];
        let report = run_study(&specs, &StudyOptions::default());
        let json = report.to_json();
        let parsed: StudyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_json(), json);
    }

    #[test]
    fn study_output_is_deterministic() {
        let specs: Vec<InstanceSpec> = (0..6)
            .map(|i| InstanceSpec::random(1, 2, [2.0, 2.0, 2.0], i as u64))
            .collect();
        let options = StudyOptions {
            restarts: 4,
            certify: true,
            ..StudyOptions::default()
        };
        let a = run_study(&specs, &options).to_json();
        let b = run_study(&specs, &options).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn ratio_thresholds_drive_the_exit_flag() {
        let specs = vec![InstanceSpec::random(1, 2, [2.0, 2.0, 2.0], 5)];
        let pass = run_study(
            &specs,
            &StudyOptions {
                ratio_min: Some(0.0),
                ratio_max: Some(1e9),
                ..StudyOptions::default()
            },
        );
        assert!(pass.thresholds_met);
        let fail = run_study(
            &specs,
            &StudyOptions {
                ratio_max: Some(1e-12),
                ..StudyOptions::default()
            },
        );
        assert!(!fail.thresholds_met);
    }

    #[test]
    fn invalid_specs_are_recorded_not_fatal() {
        let bad = InstanceSpec::random(1, 1, [3.0, 3.0, 4.0], 0);
        let report = run_study(std::slice::from_ref(&bad), &StudyOptions::default());
        assert_eq!(report.aggregate.failed, 1);
        assert!(report.thresholds_met);
        let strict = run_study(
            &[bad],
            &StudyOptions {
                strict: true,
                ..StudyOptions::default()
            },
        );
        assert!(!strict.thresholds_met);
    }
}
