#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phenotopo_core::calendar::Date;
use phenotopo_testkit::FixtureDay;

/// Minimum air temperature used by every fixture row; LTE50 is derived so
/// that MIN_AT − LTE50 is the fixture's δ.
pub const MIN_AT: f64 = -5.0;

/// Fixture days as ingest CSV, with a SEASON_JDAY column and a weather-only
/// summer row that ingest must drop.
pub fn fixture_csv(days: &[FixtureDay]) -> String {
    let mut out = String::from("CULTIVAR,DATE,LTE10,LTE50,LTE90,SEASON_JDAY,MIN_AT,AVG_AT,MAX_AT\n");
    for d in days {
        let date = Date::from_season_jday(d.start_year, d.jday);
        out.push_str(&format!("{},{},,{},,{},{},,\n", d.cultivar, date, MIN_AT - d.delta, d.jday, MIN_AT));
    }
    out.push_str("CS,2018-07-04,,,,,14.5,21.0,30.2\n");
    out
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn phenotopo<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_phenotopo")).args(args).output().expect("binary runs")
}

/// Five cultivars, each with the two planted seasons bowing apart by a
/// different amount.
pub fn five_cultivars() -> Vec<FixtureDay> {
    let mut days = Vec::new();
    for (cultivar, sep) in [("CD", 0.1), ("CH", 0.2), ("CS", 0.3), ("MR", 0.4), ("WR", 0.5)] {
        days.extend(phenotopo_testkit::planted_divergence(sep).into_iter().map(|d| FixtureDay { cultivar, ..d }));
    }
    days
}
