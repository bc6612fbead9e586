use suspension_adg::extraction::{stats_table, StatsRow};
use suspension_adg::{build_splitting_graph, extract_report, CompatibilityTable};

use crate::{formats, load_suspension, policy, Failure, Options, OutFormat};

fn row(path: &str, o: &Options) -> Result<StatsRow, Failure> {
    let s = load_suspension(path, o)?;
    let table = CompatibilityTable::new(&s);
    let y = build_splitting_graph(&s, &table, policy(o))?;
    let r = extract_report(&s, &table, &y, Default::default(), o.obs_cap)
        .map_err(|e| Failure::domain(e.to_string()))?;
    Ok(StatsRow::new(path, &r))
}

pub(crate) fn run(paths: &[String], o: &Options) -> Result<String, Failure> {
    let json = match o.format {
        None => false,
        Some(_) => formats(o, &[OutFormat::Json])? == OutFormat::Json,
    };
    let rows = paths
        .iter()
        .map(|p| row(p, o))
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        let v: Vec<_> = rows.iter().map(StatsRow::to_json).collect();
        return Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&v).expect("serializable")
        ));
    }
    Ok(stats_table(&rows))
}
