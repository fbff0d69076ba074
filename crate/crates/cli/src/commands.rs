use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use embdim::empirical::scan_parallel;
use embdim::sizing::{sample_curves, table_signatures, TABLE_ELEMENT_BITS};
use embdim::verify::KernelCheckConfig;
use embdim::{
    empirical_entropy, entropy_curve, read_records, recommend_dim, roofline_table,
    weighted_lookup_entropy, EmpiricalReport, EntropyCurve, EntropyMethod, LookupSignature,
};
use serde::Serialize;

use crate::args::{CurveArgs, OutputFormat, RooflineArgs, ScanArgs, TableArgs, VerifyArgs};
use crate::format::{
    curve_csv, curve_records, table_csv, to_json, MethodReport, RooflineReport, TableRecord,
};
use crate::svg::{self, Chart, Series, XScale};
use crate::{CliError, ExitStatus, Output};

pub fn roofline(args: &RooflineArgs) -> Result<Output, CliError> {
    if args.s.is_empty() {
        return Err(CliError::Validation(
            "--s needs at least one element width".into(),
        ));
    }
    let sig = LookupSignature::new(args.n, args.k, args.t)?;
    let mut methods = args.methods.clone();
    methods.dedup();
    let mut reports = Vec::with_capacity(methods.len());
    for method in methods {
        let h = weighted_lookup_entropy::<f64>(&sig, method)?;
        let mut recommended_d = BTreeMap::new();
        let mut capacity_bits = BTreeMap::new();
        for &s in &args.s {
            let d = recommend_dim(h, s, args.rounding)?;
            recommended_d.insert(s, d);
            capacity_bits.insert(s, d * u64::from(s));
        }
        reports.push(MethodReport {
            method,
            h_bits: h.bits(),
            recommended_d,
            capacity_bits,
        });
    }
    let report = RooflineReport {
        n: sig.n(),
        k: sig.k(),
        t: sig.t(),
        rounding: args.rounding,
        reports,
    };
    Ok(Output::new(to_json(&report)?, args.output.clone()))
}

/// Rows of the built-in sample-signature table.
pub fn table_records(
    method: EntropyMethod,
    rounding: embdim::Rounding,
) -> Result<Vec<TableRecord>, CliError> {
    let rows = roofline_table::<f64>(&table_signatures(), &TABLE_ELEMENT_BITS, method, rounding)?;
    Ok(rows.iter().map(TableRecord::from_row).collect())
}

pub fn table(args: &TableArgs) -> Result<Output, CliError> {
    let records = table_records(args.method, args.rounding)?;
    let body = match args.format {
        OutputFormat::Csv => table_csv(&records),
        OutputFormat::Json => to_json(&records)?,
        OutputFormat::Svg => {
            return Err(CliError::Validation("table output is csv or json".into()));
        }
    };
    Ok(Output::new(body, args.output.clone()))
}

#[derive(Serialize)]
struct CurveDocument<'a> {
    method: EntropyMethod,
    curves: &'a [EntropyCurve],
}

pub fn curve(args: &CurveArgs) -> Result<Output, CliError> {
    let (curves, grouped) = if args.signatures.is_some() {
        (sample_curves::<f64>(args.method)?, true)
    } else {
        let n = args
            .n
            .ok_or_else(|| CliError::Validation("--n is required without --signatures".into()))?;
        let range = match &args.k {
            Some(r) => r.clone(),
            None if n >= 2 => 1..=n - 1,
            None => 0..=n,
        };
        (vec![entropy_curve::<f64>(n, range, args.method)?], false)
    };
    let body = match args.format {
        OutputFormat::Csv => curve_csv(&curve_records(&curves, grouped)),
        OutputFormat::Json => to_json(&CurveDocument {
            method: args.method,
            curves: &curves,
        })?,
        OutputFormat::Svg => curve_svg(&curves, grouped, args.method),
    };
    Ok(Output::new(body, args.output.clone()))
}

pub fn curve_svg(curves: &[EntropyCurve], grouped: bool, method: EntropyMethod) -> String {
    let series: Vec<Series> = curves
        .iter()
        .map(|c| Series {
            label: format!("n = {}", c.n),
            points: c.points.iter().map(|&(k, h)| (k as f64, h)).collect(),
        })
        .collect();
    let title = if grouped {
        format!("Entropy of sample lookup signatures ({method})")
    } else {
        format!("Entropy of C({}, k) lookups ({method})", curves[0].n)
    };
    svg::render(&Chart {
        title: &title,
        x_label: "k (selected items per lookup)",
        y_label: "entropy [bits], log2 scale",
        x_scale: if grouped {
            XScale::Log10
        } else {
            XScale::Linear
        },
        series: &series,
    })
}

/// Reads, scans and summarizes a lookup file.
pub fn scan_report(args: &ScanArgs) -> Result<EmpiricalReport, CliError> {
    let file = File::open(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let dataset = read_records(BufReader::new(file), args.input_format)?;
    let mut hist = scan_parallel(&dataset.records, args.n, args.t, args.shards);
    if let (Err(embdim::Error::EmptyInput), true) = (&hist, dataset.malformed > 0) {
        return Err(CliError::Validation(format!(
            "no valid records ({} malformed lines)",
            dataset.malformed
        )));
    }
    if let Ok(h) = &mut hist {
        h.add_skipped(dataset.malformed);
    }
    Ok(empirical_entropy::<f64>(&hist?)?)
}

pub fn scan(args: &ScanArgs) -> Result<Output, CliError> {
    let report = scan_report(args)?;
    let mut out = Output::new(to_json(&report)?, args.output.clone());
    if report.skipped_records > 0 {
        out.warnings.push(format!(
            "{} records skipped as invalid",
            report.skipped_records
        ));
    }
    Ok(out)
}

pub fn verify_kernels(args: &VerifyArgs) -> Result<Output, CliError> {
    let cfg = KernelCheckConfig {
        n: args.n,
        d: args.d,
        r: args.r,
        k: args.k,
        seed: args.seed,
        trials: args.trials,
        inject_fault: args.inject_fault,
    };
    let outcomes = embdim::verify::verify_kernels(&cfg)?;
    let mut body = String::new();
    for o in &outcomes {
        match &o.detail {
            None => body.push_str(&format!("PASS  {}\n", o.name)),
            Some(d) => body.push_str(&format!("FAIL  {} ({d})\n", o.name)),
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    body.push_str(&format!(
        "{passed}/{} properties passed (n={}, d={}, r={}, k={}, seed={}, trials={})\n",
        outcomes.len(),
        cfg.n,
        cfg.d,
        cfg.r,
        cfg.k,
        cfg.seed,
        cfg.trials
    ));
    let mut out = Output::new(body, None);
    if passed < outcomes.len() {
        out.status = ExitStatus::VerificationFailed;
    }
    Ok(out)
}
