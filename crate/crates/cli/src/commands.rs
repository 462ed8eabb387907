//! One function per CLI verb, each turning a scenario into a result table.

use prompt_pricing::{
    classify_cost_shape, classify_prompt_shape, cost_based_pricing, grid_oracle,
    homogeneous_payoff_curve, opp_with_trace, optimal_prompt_count, select_model, user_payoff,
    utility_based_pricing, Ambiguity, AmbiguityDistribution, CostShape, PromptCount, PromptShape,
};
use rayon::prelude::*;

use crate::error::CliError;
use crate::scenario::{Scenario, SweepVariable};
use crate::table::{Cell, Table};

/// Ambiguity grid used when a scenario has no `[sweep]`.
pub const DEFAULT_EPS_POINTS: usize = 99;

fn prompt_shape_label(s: PromptShape) -> &'static str {
    match s {
        PromptShape::AlwaysInfinite => "always_infinite",
        PromptShape::InverseUShaped => "inverse_u",
        PromptShape::Decreasing => "decreasing",
        PromptShape::AlwaysZero => "always_zero",
    }
}

fn cost_shape_label(s: CostShape) -> &'static str {
    match s {
        CostShape::Increasing => "increasing",
        CostShape::InverseUShaped => "inverse_u",
        CostShape::Decreasing => "decreasing",
        CostShape::AlwaysZero => "always_zero",
    }
}

fn eps_grid(s: &Scenario, verb: &str) -> Result<Vec<Ambiguity>, CliError> {
    let values = match &s.sweep {
        None => (1..=DEFAULT_EPS_POINTS)
            .map(|i| i as f64 / (DEFAULT_EPS_POINTS + 1) as f64)
            .collect(),
        Some(sw) if sw.variable == SweepVariable::Eps => sw.values(),
        Some(_) => return Err(s.invalid(vec![format!("sweep.variable: `{verb}` sweeps `eps`")])),
    };
    values
        .into_iter()
        .map(|v| Ambiguity::new(v).map_err(CliError::from))
        .collect()
}

/// Columns: `eps`, then `n_<id>`, `payoff_<id>` and `shape_<id>` per model
/// (the user restricted to that model), then `selected`, `n_selected`,
/// `payoff`.
pub fn user_strategy(s: &Scenario) -> Result<Table, CliError> {
    let Some(prices) = &s.prices else {
        let missing = s
            .models
            .iter()
            .enumerate()
            .map(|(i, m)| {
                format!(
                    "models[{i}].price: `user-strategy` needs a price for `{}`",
                    m.id()
                )
            })
            .collect();
        return Err(s.invalid(missing));
    };
    let grid = eps_grid(s, "user-strategy")?;

    let mut columns = vec!["eps".to_string()];
    for m in &s.models {
        columns.push(format!("n_{}", m.id()));
        columns.push(format!("payoff_{}", m.id()));
        columns.push(format!("shape_{}", m.id()));
    }
    columns.extend(["selected", "n_selected", "payoff"].map(String::from));
    let mut table = Table::new(columns);

    let count_cell = |c: PromptCount| match c {
        PromptCount::Finite(n) => Cell::Int(n),
        PromptCount::Unbounded => Cell::text("unbounded"),
    };
    let rows: Result<Vec<Vec<Cell>>, CliError> = grid
        .par_iter()
        .map(|&eps| {
            let mut row = vec![Cell::Num(eps.value())];
            for m in &s.models {
                let p = prices.price(m.id())?;
                let count = optimal_prompt_count(m, p, eps)?;
                let payoff = match count {
                    PromptCount::Finite(n) => user_payoff(m, p, eps, n),
                    PromptCount::Unbounded => m.utility(),
                };
                row.push(count_cell(count));
                row.push(Cell::Num(payoff));
                row.push(Cell::text(prompt_shape_label(classify_prompt_shape(m, p)?)));
            }
            let d = select_model(&s.models, prices, eps)?;
            row.push(Cell::text(
                d.selected_model.unwrap_or_else(|| "none".into()),
            ));
            row.push(count_cell(d.prompt_count));
            row.push(Cell::Num(d.payoff));
            Ok(row)
        })
        .collect();
    for row in rows? {
        table.push(row);
    }
    Ok(table)
}

/// Columns: `eps, best_model, served_model, price, sigma, capped,
/// n_at_price, payoff, cost_shape`.
pub fn homog_price(s: &Scenario) -> Result<Table, CliError> {
    let grid = eps_grid(s, "homog-price")?;
    let curve = homogeneous_payoff_curve(&s.models, &grid)?;
    let mut table = Table::new([
        "eps",
        "best_model",
        "served_model",
        "price",
        "sigma",
        "capped",
        "n_at_price",
        "payoff",
        "cost_shape",
    ]);
    for p in curve {
        let model = s
            .models
            .get(&p.best_model)
            .expect("best model is in the set");
        table.push(vec![
            Cell::Num(p.eps),
            Cell::text(p.best_model.clone()),
            Cell::text(p.served_model.unwrap_or_else(|| "none".into())),
            Cell::Num(p.price),
            Cell::Int(p.sigma),
            Cell::Bool(p.capped),
            Cell::Int(p.prompt_count),
            Cell::Num(p.payoff),
            Cell::text(cost_shape_label(classify_cost_shape(model))),
        ]);
    }
    Ok(table)
}

fn require_pair(s: &Scenario, verb: &str) -> Result<(), CliError> {
    if s.models.len() == 2 {
        Ok(())
    } else {
        Err(s.invalid(vec![format!(
            "models: `{verb}` needs exactly two models, got {}",
            s.models.len()
        )]))
    }
}

pub struct OppRun {
    pub summary: Table,
    /// One row per grid price of the low model.
    pub trace: Table,
}

/// Summary columns: `method, p_<id>..., N_<id>..., payoff`, plus
/// `oracle_p_<id>..., oracle_payoff` with `oracle`.
pub fn opp(s: &Scenario, oracle: bool) -> Result<OppRun, CliError> {
    require_pair(s, "opp")?;
    let (out, trace_rows) = opp_with_trace(&s.models, &s.distribution, &s.opp_config())?;
    let ids: Vec<&str> = s.models.iter().map(|m| m.id()).collect();

    let mut columns = vec!["method".to_string()];
    columns.extend(ids.iter().map(|id| format!("p_{id}")));
    columns.extend(ids.iter().map(|id| format!("N_{id}")));
    columns.push("payoff".into());
    let mut row = vec![Cell::text(out.method.label())];
    for id in &ids {
        row.push(Cell::Num(out.schedule.price(id)?));
    }
    for id in &ids {
        row.push(Cell::Num(out.prompt_volume[*id]));
    }
    row.push(Cell::Num(out.platform_payoff));

    if oracle {
        let o = grid_oracle(&s.models, &s.distribution, s.oracle_grid, &s.quad)?;
        columns.extend(ids.iter().map(|id| format!("oracle_p_{id}")));
        columns.push("oracle_payoff".into());
        for id in &ids {
            row.push(Cell::Num(o.schedule.price(id)?));
        }
        row.push(Cell::Num(o.platform_payoff));
    }
    let mut summary = Table::new(columns);
    summary.push(row);

    let mut trace = Table::new(["p_low", "p_high", "payoff", "low_only_payoff", "candidates"]);
    for r in trace_rows {
        trace.push(vec![
            Cell::Num(r.p_low),
            Cell::Num(r.p_high),
            Cell::Num(r.platform_payoff),
            Cell::Num(r.low_only_payoff),
            Cell::Int(r.candidates as u64),
        ]);
    }
    Ok(OppRun { summary, trace })
}

/// Columns: `eps_min, payoff_opp, payoff_utility, payoff_cost`, plus
/// `payoff_oracle` with `oracle`. The population is uniform on
/// `[eps_min, eps_max]`, with `eps_max` taken from the scenario.
pub fn compare(s: &Scenario, oracle: bool) -> Result<Table, CliError> {
    require_pair(s, "compare")?;
    let AmbiguityDistribution::Uniform { min, max } = s.distribution else {
        return Err(s.invalid(vec![
            "distribution: `compare` sweeps the lower end of a uniform distribution".into(),
        ]));
    };
    let eps_mins = match &s.sweep {
        None => vec![min],
        Some(sw) if sw.variable == SweepVariable::EpsMin => {
            if sw.stop >= max {
                return Err(s.invalid(vec![format!(
                    "sweep.stop: must be below distribution.max ({max}), got {}",
                    sw.stop
                )]));
            }
            sw.values()
        }
        Some(_) => return Err(s.invalid(vec!["sweep.variable: `compare` sweeps `eps_min`".into()])),
    };
    let cfg = s.opp_config();
    let rows: Result<Vec<Vec<Cell>>, CliError> = eps_mins
        .par_iter()
        .map(|&lo| {
            let d = AmbiguityDistribution::uniform(lo, max)?;
            let opp = opp_with_trace(&s.models, &d, &cfg)?.0;
            let util = utility_based_pricing(&s.models, &d, &s.quad)?;
            let cost = cost_based_pricing(&s.models, &d, &s.quad)?;
            let mut row = vec![
                Cell::Num(lo),
                Cell::Num(opp.platform_payoff),
                Cell::Num(util.platform_payoff),
                Cell::Num(cost.platform_payoff),
            ];
            if oracle {
                let o = grid_oracle(&s.models, &d, s.oracle_grid, &s.quad)?;
                row.push(Cell::Num(o.platform_payoff));
            }
            Ok(row)
        })
        .collect();
    let mut columns = vec!["eps_min", "payoff_opp", "payoff_utility", "payoff_cost"];
    if oracle {
        columns.push("payoff_oracle");
    }
    let mut table = Table::new(columns);
    for row in rows? {
        table.push(row);
    }
    Ok(table)
}
