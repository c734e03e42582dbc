//! Exact integer-programming export.
//!
//! Builds the arc-based formulation of the problem — arc choice variables,
//! position variables with the classical subtour-elimination rows, relation
//! activation variables and arc-ordering indicators — and writes it in LP
//! text format for an external solver. No solver is invoked here; the module
//! also prices complete tours as assignments and checks them row by row,
//! which is how the formulation is cross-validated against the evaluator.
//!
//! The ordering indicator `z_a_b` may be 1 only when the tail of arc `a`
//! sits at a position no later than the tail of arc `b`. Every logical
//! implication the relation rows need is expressed through that single
//! upper-bound direction by picking the right orientation, so one row per
//! ordered arc pair suffices.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::evaluate_tour;
use crate::instance::{Instance, Tour};

/// Default ceiling on the number of constraint rows in an exported model.
pub const DEFAULT_CONSTRAINT_CAP: usize = 1_000_000;

/// Default feasibility tolerance for assignment checking.
pub const CHECK_TOLERANCE: f64 = 1e-6;

/// Maps structured variables to flat column indices: arc choices first,
/// then node positions, relation activations and arc-ordering indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarLayout {
    arc_count: usize,
    node_count: usize,
    relation_count: usize,
}

impl VarLayout {
    pub fn of(inst: &Instance) -> Self {
        VarLayout {
            arc_count: inst.arcs().len(),
            node_count: inst.node_count(),
            relation_count: inst.relations().len(),
        }
    }

    /// Arc-choice variable of arc `a`.
    pub fn x(&self, a: usize) -> usize {
        debug_assert!(a < self.arc_count);
        a
    }

    /// Position variable of node `i`.
    pub fn u(&self, i: usize) -> usize {
        debug_assert!(i < self.node_count);
        self.arc_count + i
    }

    /// Activation variable of relation `r`.
    pub fn y(&self, r: usize) -> usize {
        debug_assert!(r < self.relation_count);
        self.arc_count + self.node_count + r
    }

    /// Ordering indicator for the ordered pair of distinct arcs `(a, b)`.
    pub fn z(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.arc_count && b < self.arc_count && a != b);
        let offset = if b < a { b } else { b - 1 };
        self.arc_count + self.node_count + self.relation_count + a * (self.arc_count - 1) + offset
    }

    pub fn x_count(&self) -> usize {
        self.arc_count
    }

    pub fn u_count(&self) -> usize {
        self.node_count
    }

    pub fn y_count(&self) -> usize {
        self.relation_count
    }

    pub fn z_count(&self) -> usize {
        self.arc_count * self.arc_count.saturating_sub(1)
    }

    pub fn var_count(&self) -> usize {
        self.x_count() + self.u_count() + self.y_count() + self.z_count()
    }
}

/// Variable domain in the exported model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarKind {
    Binary,
    /// General integer with inclusive bounds.
    Integer { lo: f64, hi: f64 },
}

#[derive(Debug, Clone)]
pub struct VarDef {
    pub name: String,
    pub kind: VarKind,
}

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// The constraint families of the formulation, used to attribute rows in
/// check reports and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Each node has exactly one outgoing tour arc.
    FlowOut,
    /// Each node has exactly one incoming tour arc.
    FlowIn,
    /// Position-based subtour elimination along each arc not entering the
    /// depot.
    Mtz,
    /// The depot sits at position zero.
    StartNode,
    /// At most one relation fires per target arc, and only if the arc is
    /// used.
    RelOne,
    /// An active relation needs its trigger arc in the tour.
    TrigIn,
    /// An active relation needs its trigger ahead of its target.
    Prec,
    /// A trigger ahead of its used target forces some relation on that
    /// target to fire.
    Forced,
    /// Ordering indicators respect the position variables.
    Zdef,
    /// Among several triggers ahead of the target, only the latest may fire.
    Last,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::FlowOut,
        Family::FlowIn,
        Family::Mtz,
        Family::StartNode,
        Family::RelOne,
        Family::TrigIn,
        Family::Prec,
        Family::Forced,
        Family::Zdef,
        Family::Last,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Family::FlowOut => "flow_out",
            Family::FlowIn => "flow_in",
            Family::Mtz => "mtz",
            Family::StartNode => "start_node",
            Family::RelOne => "rel_one",
            Family::TrigIn => "trig_in",
            Family::Prec => "prec",
            Family::Forced => "forced",
            Family::Zdef => "zdef",
            Family::Last => "last",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One constraint row: named, attributed to a family, with merged terms.
#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub family: Family,
    /// `(column, coefficient)` pairs, sorted by column, zeros dropped.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A complete exported model.
#[derive(Debug, Clone)]
pub struct Model {
    name: String,
    layout: VarLayout,
    vars: Vec<VarDef>,
    objective: Vec<(usize, f64)>,
    rows: Vec<Row>,
}

/// Sums duplicate columns and drops exact zeros, keeping column order.
fn merge_terms(mut terms: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    terms.sort_by_key(|&(col, _)| col);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for (col, coeff) in terms {
        match merged.last_mut() {
            Some((last, sum)) if *last == col => *sum += coeff,
            _ => merged.push((col, coeff)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    merged
}

impl Model {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &VarLayout {
        &self.layout
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn rows_in(&self, family: Family) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    fn push_row(
        &mut self,
        family: Family,
        name: String,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let terms = merge_terms(terms);
        debug_assert!(!terms.is_empty(), "empty constraint row {name}");
        self.rows.push(Row { name, family, terms, sense, rhs });
    }

    /// Objective value of an assignment under this model.
    pub fn objective_value(&self, assignment: &Assignment) -> f64 {
        self.objective.iter().map(|&(col, c)| c * assignment.value(col)).sum()
    }

    /// Renders the model as LP text. The output is a pure function of the
    /// model: identical models render to identical bytes.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        out.push('\\');
        out.push(' ');
        out.push_str(&self.name);
        out.push('\n');

        out.push_str("Minimize\n");
        let mut pieces = term_pieces(&self.objective, &self.vars);
        push_wrapped(&mut out, " obj:", &pieces);

        out.push_str("Subject To\n");
        for row in &self.rows {
            pieces = term_pieces(&row.terms, &self.vars);
            pieces.push(format!("{} {}", row.sense, row.rhs));
            push_wrapped(&mut out, &format!(" {}:", row.name), &pieces);
        }

        out.push_str("Bounds\n");
        for var in &self.vars {
            if let VarKind::Integer { lo, hi } = var.kind {
                out.push_str(&format!(" {} <= {} <= {}\n", lo, var.name, hi));
            }
        }

        out.push_str("Generals\n");
        let generals: Vec<String> = self
            .vars
            .iter()
            .filter(|v| matches!(v.kind, VarKind::Integer { .. }))
            .map(|v| v.name.clone())
            .collect();
        push_wrapped(&mut out, "", &generals);

        out.push_str("Binaries\n");
        let binaries: Vec<String> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.clone())
            .collect();
        push_wrapped(&mut out, "", &binaries);

        out.push_str("End\n");
        out
    }
}

/// Formats merged terms as LP pieces: `"c name"`, then `"+ c name"` or
/// `"- c name"`.
fn term_pieces(terms: &[(usize, f64)], vars: &[VarDef]) -> Vec<String> {
    terms
        .iter()
        .enumerate()
        .map(|(k, &(col, coeff))| {
            let magnitude = coeff.abs();
            let name = &vars[col].name;
            if k == 0 {
                if coeff < 0.0 {
                    format!("- {magnitude} {name}")
                } else {
                    format!("{magnitude} {name}")
                }
            } else if coeff < 0.0 {
                format!("- {magnitude} {name}")
            } else {
                format!("+ {magnitude} {name}")
            }
        })
        .collect()
}

const LP_LINE_WIDTH: usize = 200;

/// Writes `head` followed by space-separated pieces, wrapping lines before
/// they exceed the width; continuation lines stay indented so the LP reader
/// treats them as part of the same statement.
fn push_wrapped(out: &mut String, head: &str, pieces: &[String]) {
    let mut line = head.to_string();
    for piece in pieces {
        if !line.is_empty() && line.len() + 1 + piece.len() > LP_LINE_WIDTH {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
        }
        line.push(' ');
        line.push_str(piece);
    }
    if !line.trim().is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
}

/// Number of rows `build_model` would create, computed without building.
pub fn count_rows(inst: &Instance) -> usize {
    let n = inst.node_count();
    let arcs = inst.arcs();
    let mtz = arcs.iter().filter(|a| a.head != 0).count();
    let targets: std::collections::HashSet<usize> =
        inst.relations().iter().map(|r| r.target).collect();
    let last: usize = targets
        .iter()
        .map(|&g| {
            let k = inst.relations().iter().filter(|r| r.target == g).count();
            k * (k - 1)
        })
        .sum();
    let layout = VarLayout::of(inst);
    2 * n + mtz + 1 + targets.len() + 3 * inst.relations().len() + layout.z_count() + last
}

/// Builds the full model with the default row cap.
pub fn build_model(inst: &Instance) -> Result<Model> {
    build_model_capped(inst, DEFAULT_CONSTRAINT_CAP)
}

/// Builds the full model, refusing instances whose row count exceeds `cap`.
pub fn build_model_capped(inst: &Instance, cap: usize) -> Result<Model> {
    let constraints = count_rows(inst);
    if constraints > cap {
        return Err(Error::ModelTooLarge { constraints, cap });
    }

    let n = inst.node_count();
    let arcs = inst.arcs();
    let relations = inst.relations();
    let layout = VarLayout::of(inst);
    let big_m = n as f64;

    let mut vars = Vec::with_capacity(layout.var_count());
    for k in 0..arcs.len() {
        vars.push(VarDef { name: format!("x_{k}"), kind: VarKind::Binary });
    }
    for i in 0..n {
        vars.push(VarDef {
            name: format!("u_{i}"),
            kind: VarKind::Integer { lo: 0.0, hi: (n - 1) as f64 },
        });
    }
    for r in 0..relations.len() {
        vars.push(VarDef { name: format!("y_r{r}"), kind: VarKind::Binary });
    }
    for a in 0..arcs.len() {
        for b in 0..arcs.len() {
            if a != b {
                vars.push(VarDef { name: format!("z_{a}_{b}"), kind: VarKind::Binary });
            }
        }
    }

    // Objective: base cost per chosen arc, plus the cost shift of each
    // active relation (its cost minus the target arc's base cost).
    let mut objective: Vec<(usize, f64)> = Vec::new();
    for (k, arc) in arcs.iter().enumerate() {
        objective.push((layout.x(k), arc.base_cost));
    }
    for (r, rel) in relations.iter().enumerate() {
        objective.push((layout.y(r), rel.cost - arcs[rel.target].base_cost));
    }

    let mut model = Model {
        name: inst.name().to_string(),
        layout,
        vars,
        objective: merge_terms(objective),
        rows: Vec::with_capacity(constraints),
    };

    // Degree rows: one arc out of and into every node.
    for i in 0..n {
        let terms: Vec<(usize, f64)> = inst.out_arcs(i).iter().map(|&k| (layout.x(k), 1.0)).collect();
        model.push_row(Family::FlowOut, format!("flow_out_{i}"), terms, Sense::Eq, 1.0);
    }
    for i in 0..n {
        let terms: Vec<(usize, f64)> = arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.head == i)
            .map(|(k, _)| (layout.x(k), 1.0))
            .collect();
        model.push_row(Family::FlowIn, format!("flow_in_{i}"), terms, Sense::Eq, 1.0);
    }

    // Position rows: using arc (i, j) forces node j one position after i,
    // which pins the positions to the tour order and rules out subtours.
    for (k, arc) in arcs.iter().enumerate() {
        if arc.head == 0 {
            continue;
        }
        let terms = vec![
            (layout.u(arc.tail), 1.0),
            (layout.u(arc.head), -1.0),
            (layout.x(k), big_m),
        ];
        model.push_row(Family::Mtz, format!("mtz_a{k}"), terms, Sense::Le, big_m - 1.0);
    }
    model.push_row(Family::StartNode, "start_node".to_string(), vec![(layout.u(0), 1.0)], Sense::Eq, 0.0);

    // At most one active relation per target arc, and none if the arc is
    // unused.
    let mut target_arcs: Vec<usize> = relations.iter().map(|r| r.target).collect();
    target_arcs.sort_unstable();
    target_arcs.dedup();
    for &g in &target_arcs {
        let mut terms: Vec<(usize, f64)> = relations
            .iter()
            .enumerate()
            .filter(|(_, r)| r.target == g)
            .map(|(ri, _)| (layout.y(ri), 1.0))
            .collect();
        terms.push((layout.x(g), -1.0));
        model.push_row(Family::RelOne, format!("rel_one_a{g}"), terms, Sense::Le, 0.0);
    }

    for (ri, rel) in relations.iter().enumerate() {
        // Active only with the trigger arc in the tour.
        model.push_row(
            Family::TrigIn,
            format!("trig_in_r{ri}"),
            vec![(layout.y(ri), 1.0), (layout.x(rel.trigger), -1.0)],
            Sense::Le,
            0.0,
        );
        // Active only with the trigger ahead of the target.
        model.push_row(
            Family::Prec,
            format!("prec_r{ri}"),
            vec![(layout.y(ri), 1.0), (layout.z(rel.trigger, rel.target), -1.0)],
            Sense::Le,
            0.0,
        );
        // Trigger and target in the tour with the trigger ahead: some
        // relation on this target must fire. "Ahead" is certified by the
        // reversed indicator being 0, which the position rows force exactly
        // when the trigger is strictly earlier.
        let mut terms = vec![
            (layout.x(rel.trigger), 1.0),
            (layout.x(rel.target), 1.0),
            (layout.z(rel.target, rel.trigger), -1.0),
        ];
        for (qi, other) in relations.iter().enumerate() {
            if other.target == rel.target {
                terms.push((layout.y(qi), -1.0));
            }
        }
        model.push_row(Family::Forced, format!("forced_r{ri}"), terms, Sense::Le, 1.0);
    }

    // Ordering indicators: z_a_b may be 1 only if the tail of a sits no
    // later than the tail of b.
    for (a, arc_a) in arcs.iter().enumerate() {
        for (b, arc_b) in arcs.iter().enumerate() {
            if a == b {
                continue;
            }
            let terms = vec![
                (layout.u(arc_a.tail), 1.0),
                (layout.u(arc_b.tail), -1.0),
                (layout.z(a, b), big_m),
            ];
            model.push_row(Family::Zdef, format!("zdef_{a}_{b}"), terms, Sense::Le, big_m);
        }
    }

    // Relation r may not fire if another trigger on the same target sits
    // strictly between r's trigger and the target.
    for (ri, rel) in relations.iter().enumerate() {
        for (qi, other) in relations.iter().enumerate() {
            if ri == qi || other.target != rel.target {
                continue;
            }
            let terms = vec![
                (layout.y(ri), 1.0),
                (layout.x(other.trigger), 1.0),
                (layout.z(other.trigger, rel.trigger), -1.0),
                (layout.z(rel.target, other.trigger), -1.0),
            ];
            model.push_row(Family::Last, format!("last_r{ri}_r{qi}"), terms, Sense::Le, 1.0);
        }
    }

    debug_assert_eq!(model.rows.len(), constraints);
    Ok(model)
}

/// Writes the LP text of a model to a file.
pub fn write_lp(model: &Model, path: &Path) -> Result<()> {
    std::fs::write(path, model.to_lp_string())?;
    Ok(())
}

/// A full value assignment for the model's columns.
#[derive(Debug, Clone)]
pub struct Assignment {
    values: Vec<f64>,
}

impl Assignment {
    pub fn new(values: Vec<f64>) -> Self {
        Assignment { values }
    }

    pub fn value(&self, col: usize) -> f64 {
        self.values[col]
    }

    pub fn set(&mut self, col: usize, value: f64) {
        self.values[col] = value;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Translates a tour into model variables: chosen arcs, node positions, the
/// relations the evaluator reports active, and ordering indicators set from
/// the positions for every ordered arc pair.
pub fn tour_assignment(inst: &Instance, tour: &Tour) -> Result<Assignment> {
    let layout = VarLayout::of(inst);
    let evaluation = evaluate_tour(inst, tour)?;
    let mut values = vec![0.0; layout.var_count()];

    for (tail, head) in tour.arc_ends() {
        let k = inst.arc_between(tail, head).expect("evaluated tours only use existing arcs");
        values[layout.x(k)] = 1.0;
    }
    for (pos, &node) in tour.nodes().iter().enumerate() {
        values[layout.u(node)] = pos as f64;
    }
    for rel in evaluation.active_relations.iter().flatten() {
        values[layout.y(*rel)] = 1.0;
    }
    let arcs = inst.arcs();
    let mut position = vec![0usize; inst.node_count()];
    for (pos, &node) in tour.nodes().iter().enumerate() {
        position[node] = pos;
    }
    for a in 0..arcs.len() {
        for b in 0..arcs.len() {
            if a != b && position[arcs[a].tail] <= position[arcs[b].tail] {
                values[layout.z(a, b)] = 1.0;
            }
        }
    }
    Ok(Assignment::new(values))
}

/// One violated row or variable domain.
#[derive(Debug, Clone)]
pub struct Violation {
    /// Row name, or `domain_<var>` for a variable outside its domain.
    pub name: String,
    /// Family of the violated row; `None` for domain violations.
    pub family: Option<Family>,
    /// How far outside the allowed range the value lies.
    pub amount: f64,
}

/// Outcome of checking an assignment against a model.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub objective: f64,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every variable domain and every row of the model against the
/// assignment, within `tolerance`.
pub fn check_assignment(model: &Model, assignment: &Assignment, tolerance: f64) -> CheckReport {
    let mut violations = Vec::new();

    for (col, var) in model.vars().iter().enumerate() {
        let v = assignment.value(col);
        let excess = match var.kind {
            VarKind::Binary => {
                let nearest = if v < 0.5 { 0.0 } else { 1.0 };
                (v - nearest).abs()
            }
            VarKind::Integer { lo, hi } => {
                let rounding = (v - v.round()).abs();
                let below = (lo - v).max(0.0);
                let above = (v - hi).max(0.0);
                rounding.max(below).max(above)
            }
        };
        if excess > tolerance {
            violations.push(Violation {
                name: format!("domain_{}", var.name),
                family: None,
                amount: excess,
            });
        }
    }

    for row in model.rows() {
        let lhs: f64 = row.terms.iter().map(|&(col, c)| c * assignment.value(col)).sum();
        let excess = match row.sense {
            Sense::Le => lhs - row.rhs,
            Sense::Ge => row.rhs - lhs,
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        if excess > tolerance {
            violations.push(Violation {
                name: row.name.clone(),
                family: Some(row.family),
                amount: excess,
            });
        }
    }

    CheckReport { objective: model.objective_value(assignment), violations }
}
