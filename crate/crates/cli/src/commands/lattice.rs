use qrs_core::lattice::{enumerate_resonances_factored, enumerate_triples, sumlem_sweep as sweep, ModeSet, DEFAULT_BUDGET};
use serde::Serialize;

use super::{csv_bytes, json_bytes};
use crate::error::{CliError, InModule};
use crate::manifest::Run;
use crate::params::{parse_mode, OutFormat, ResonancesParams, SumlemParams};

#[derive(Serialize)]
struct TupleRow {
    p1x: i64,
    p1y: i64,
    p2x: i64,
    p2y: i64,
    p3x: i64,
    p3y: i64,
    p4x: i64,
    p4y: i64,
    p5x: i64,
    p5y: i64,
}

#[derive(Serialize)]
struct TupleList {
    radius: u32,
    j: [i64; 2],
    count: usize,
    tuples: Vec<[[i64; 2]; 5]>,
}

pub fn resonances(run: &mut Run, p: &ResonancesParams) -> Result<bool, CliError> {
    let modes = ModeSet::new(p.radius);
    let j = parse_mode(&p.j)?;
    modes.require(j).in_module("lattice")?;
    let triples = enumerate_triples(&modes, DEFAULT_BUDGET).in_module("lattice")?;
    let list = enumerate_resonances_factored(j, &modes, &triples).in_module("lattice")?;
    let (name, bytes) = match p.format {
        OutFormat::Csv => {
            let rows: Vec<TupleRow> = list
                .iter()
                .map(|t| {
                    let q = t.p;
                    TupleRow {
                        p1x: q[0].px,
                        p1y: q[0].py,
                        p2x: q[1].px,
                        p2y: q[1].py,
                        p3x: q[2].px,
                        p3y: q[2].py,
                        p4x: q[3].px,
                        p4y: q[3].py,
                        p5x: q[4].px,
                        p5y: q[4].py,
                    }
                })
                .collect();
            ("resonances.csv", csv_bytes(&rows)?)
        }
        OutFormat::Json => {
            let doc = TupleList {
                radius: p.radius,
                j: [j.px, j.py],
                count: list.len(),
                tuples: list.iter().map(|t| t.p.map(|m| [m.px, m.py])).collect(),
            };
            ("resonances.json", json_bytes(&doc)?)
        }
    };
    let name = p.out.as_deref().unwrap_or(name);
    run.write(name, &bytes)?;
    println!("{} resonant quintuples for j = ({},{}) at radius {}", list.len(), j.px, j.py, p.radius);
    Ok(true)
}

#[derive(Serialize)]
struct SumlemRow {
    jx: i64,
    jy: i64,
    statistic: f64,
}

pub fn sumlem_sweep(run: &mut Run, p: &SumlemParams) -> Result<bool, CliError> {
    let modes = ModeSet::new(p.radius);
    let rows: Vec<SumlemRow> = sweep(&modes, DEFAULT_BUDGET)
        .in_module("lattice")?
        .into_iter()
        .map(|(j, s)| SumlemRow { jx: j.px, jy: j.py, statistic: s })
        .collect();
    run.write(&p.out, &csv_bytes(&rows)?)?;
    let max = rows.iter().map(|r| r.statistic).fold(0.0, f64::max);
    println!("radius {}: max statistic {max}", p.radius);
    Ok(true)
}
