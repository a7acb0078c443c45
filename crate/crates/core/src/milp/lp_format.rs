//! Plain-text LP file export.
//!
//! Writes the minimize form of a model in the widely read CPLEX LP format
//! so instances can be cross-checked against external solvers. Only the
//! features the model container uses are emitted: linear objective, linear
//! rows, bounds, and a Generals section for integer columns.

use std::io::{self, Write};

use super::model::{MilpModel, Relation};

fn coef(first: bool, a: f64, name: &str) -> String {
    let sign = if a < 0.0 { "-" } else if first { "" } else { "+" };
    let mag = a.abs();
    if first && sign.is_empty() {
        format!("{mag} {name}")
    } else {
        format!("{sign} {mag} {name}")
    }
}

/// Write `model` as an LP-format file.
pub fn write_lp<W: Write>(model: &MilpModel, out: &mut W) -> io::Result<()> {
    writeln!(out, "Minimize")?;
    let mut line = String::from(" obj:");
    let mut first = true;
    for v in &model.variables {
        if v.objective != 0.0 {
            line.push(' ');
            line.push_str(&coef(first, v.objective, &v.name));
            first = false;
            if line.len() > 200 {
                writeln!(out, "{line}")?;
                line = String::from("   ");
                // Continuation lines must not restart the sign logic.
            }
        }
    }
    if first {
        line.push_str(" 0 ");
        line.push_str(&model.variables.first().map_or("x", |v| v.name.as_str()).to_string());
    }
    writeln!(out, "{line}")?;

    writeln!(out, "Subject To")?;
    for row in &model.rows {
        let mut line = format!(" {}:", row.name);
        let mut first = true;
        for &(j, a) in &row.terms {
            line.push(' ');
            line.push_str(&coef(first, a, &model.variables[j].name));
            first = false;
            if line.len() > 200 {
                writeln!(out, "{line}")?;
                line = String::from("   ");
            }
        }
        if first {
            line.push_str(" 0 ");
            line.push_str(model.variables.first().map_or("x", |v| v.name.as_str()));
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        writeln!(out, "{line} {rel} {}", row.rhs)?;
    }

    writeln!(out, "Bounds")?;
    for v in &model.variables {
        let lo_inf = v.lb == f64::NEG_INFINITY;
        let hi_inf = v.ub == f64::INFINITY;
        match (lo_inf, hi_inf) {
            (true, true) => writeln!(out, " {} free", v.name)?,
            (true, false) => writeln!(out, " -inf <= {} <= {}", v.name, v.ub)?,
            (false, true) => {
                // The format default is a zero lower bound; state nonzero ones.
                if v.lb != 0.0 {
                    writeln!(out, " {} >= {}", v.name, v.lb)?;
                }
            }
            (false, false) => writeln!(out, " {} <= {} <= {}", v.lb, v.name, v.ub)?,
        }
    }

    if model.num_integers() > 0 {
        writeln!(out, "Generals")?;
        let mut line = String::new();
        for v in &model.variables {
            if v.integer {
                line.push(' ');
                line.push_str(&v.name);
                if line.len() > 200 {
                    writeln!(out, "{line}")?;
                    line.clear();
                }
            }
        }
        if !line.is_empty() {
            writeln!(out, "{line}")?;
        }
    }
    writeln!(out, "End")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Relation::*;

    #[test]
    fn small_model_round_trips_by_eye() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, 4.0, true, 1.5);
        let y = m.add_var("y", f64::NEG_INFINITY, f64::INFINITY, false, -2.0);
        m.add_row("cap", vec![(x, 1.0), (y, -3.0)], Le, 7.0);
        m.add_row("bal", vec![(x, 2.0), (y, 1.0)], Eq, 4.0);
        let mut buf = Vec::new();
        write_lp(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let expected = "Minimize\n obj: 1.5 x - 2 y\nSubject To\n cap: 1 x - 3 y <= 7\n bal: 2 x + 1 y = 4\nBounds\n 0 <= x <= 4\n y free\nGenerals\n x\nEnd\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn empty_objective_still_parses() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, 1.0, false, 0.0);
        m.add_row("r", vec![(x, 1.0)], Ge, 0.5);
        let mut buf = Vec::new();
        write_lp(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("obj: 0 x"));
        assert!(text.contains("r: 1 x >= 0.5"));
    }
}
