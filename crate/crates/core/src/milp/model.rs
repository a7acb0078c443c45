//! Model container: variables, linear rows, minimization objective.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub integer: bool,
    pub objective: f64,
    /// Branching preference; higher goes first. Zero by default.
    pub branch_priority: i32,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    /// (column, coefficient) terms; columns may not repeat.
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A mixed-integer linear program, always minimizing.
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub rows: Vec<Row>,
}

impl MilpModel {
    pub fn new() -> MilpModel {
        MilpModel::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lb: f64,
        ub: f64,
        integer: bool,
        objective: f64,
    ) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lb,
            ub,
            integer,
            objective,
            branch_priority: 0,
        });
        self.variables.len() - 1
    }

    /// Make the branch-and-bound search branch on `column` before any
    /// column of lower priority.
    pub fn set_branch_priority(&mut self, column: usize, priority: i32) {
        self.variables[column].branch_priority = priority;
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row { name: name.into(), terms, relation, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_integers(&self) -> usize {
        self.variables.iter().filter(|v| v.integer).count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, &x)| v.objective * x)
            .sum()
    }

    pub fn row_activity(&self, row: &Row, values: &[f64]) -> f64 {
        row.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Largest constraint or bound violation of a candidate point.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lb - x).max(x - v.ub);
        }
        for row in &self.rows {
            let act = self.row_activity(row, values);
            let viol = match row.relation {
                Relation::Le => act - row.rhs,
                Relation::Ge => row.rhs - act,
                Relation::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    /// Name of the row whose violation is largest, for diagnostics.
    pub fn worst_row(&self, values: &[f64]) -> Option<(&str, f64)> {
        let mut worst: Option<(&str, f64)> = None;
        for row in &self.rows {
            let act = self.row_activity(row, values);
            let viol = match row.relation {
                Relation::Le => act - row.rhs,
                Relation::Ge => row.rhs - act,
                Relation::Eq => (act - row.rhs).abs(),
            };
            if worst.map_or(true, |(_, w)| viol > w) {
                worst = Some((row.name.as_str(), viol));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bookkeeping() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, 1.0, true, 2.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, -1.0);
        m.add_row("r", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        assert_eq!(m.num_vars(), 2);
        assert_eq!(m.num_integers(), 1);
        assert_eq!(m.objective_value(&[1.0, 3.0]), -1.0);
        assert_eq!(m.max_violation(&[1.0, 3.0]), 3.0); // 1 + 6 vs 4
        assert_eq!(m.worst_row(&[1.0, 3.0]).unwrap().0, "r");
        assert_eq!(m.max_violation(&[1.0, 1.0]), 0.0);
    }
}
