//! SNR-threshold MCS tables.
//!
//! Each entry's `min_snr_db` is the negated EVM requirement of that MCS, so a
//! link sustains the MCS whenever `snr >= min_snr_db`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct McsEntry {
    pub index: u32,
    pub label: String,
    pub min_snr_db: f64,
    pub phy_rate_bps: f64,
}

/// Validated MCS table, sorted ascending by threshold and by rate.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

impl McsTable {
    /// Builds a table from entries given in ascending order.
    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("McsTable.entries", "table is empty"));
        }
        for e in &entries {
            if !e.min_snr_db.is_finite() {
                return Err(Error::invalid("McsEntry.min_snr_db", format!("MCS {} threshold must be finite", e.index)));
            }
            if !(e.phy_rate_bps > 0.0 && e.phy_rate_bps.is_finite()) {
                return Err(Error::invalid(
                    "McsEntry.phy_rate_bps",
                    format!("MCS {} rate must be > 0, got {}", e.index, e.phy_rate_bps),
                ));
            }
        }
        for pair in entries.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if !(b.min_snr_db > a.min_snr_db) {
                return Err(Error::invalid(
                    "McsTable.entries",
                    format!(
                        "min_snr_db must be strictly ascending (MCS {} at {} dB then MCS {} at {} dB)",
                        a.index, a.min_snr_db, b.index, b.min_snr_db
                    ),
                ));
            }
            if !(b.phy_rate_bps > a.phy_rate_bps) {
                return Err(Error::invalid(
                    "McsTable.entries",
                    format!("phy_rate_bps must be strictly ascending (MCS {} then MCS {})", a.index, b.index),
                ));
            }
        }
        let mut indices: Vec<u32> = entries.iter().map(|e| e.index).collect();
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid("McsEntry.index", format!("duplicate index {}", w[0])));
        }
        if indices[0] < 1 {
            return Err(Error::invalid("McsEntry.index", "indices start at 1"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_index(&self, index: u32) -> Option<&McsEntry> {
        self.entries.iter().find(|e| e.index == index)
    }
}

/// Parses the `index,label,min_snr_db,phy_rate_mbps` text format.
/// Lines starting with `#` are comments; rates are converted to bit/s.
pub fn load_mcs_table(source: &str) -> Result<McsTable> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(source.as_bytes());

    let headers = reader.headers().map_err(|e| Error::invalid("McsTable", format!("cannot read header: {e}")))?.clone();
    let expected = ["index", "label", "min_snr_db", "phy_rate_mbps"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::invalid(
            "McsTable",
            format!("header must be `{}`, got `{}`", expected.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::invalid("McsTable", e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize, name: &str| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::invalid("McsTable", format!("line {line}: missing {name}")))
        };
        let index: u32 =
            field(0, "index")?.parse().map_err(|e| Error::invalid("McsEntry.index", format!("line {line}: {e}")))?;
        let label = field(1, "label")?.to_string();
        let min_snr_db: f64 = field(2, "min_snr_db")?
            .parse()
            .map_err(|e| Error::invalid("McsEntry.min_snr_db", format!("line {line}: {e}")))?;
        let rate_mbps: f64 = field(3, "phy_rate_mbps")?
            .parse()
            .map_err(|e| Error::invalid("McsEntry.phy_rate_bps", format!("line {line}: {e}")))?;
        entries.push(McsEntry { index, label, min_snr_db, phy_rate_bps: rate_mbps * 1e6 });
    }
    McsTable::new(entries)
}

/// Highest entry whose threshold is at or below `snr_db`; `None` is no-link.
pub fn select_mcs(table: &McsTable, snr_db: f64) -> Option<&McsEntry> {
    // Thresholds are sorted, so the count of entries at or below snr is the
    // partition point.
    let n = table.entries.partition_point(|e| e.min_snr_db <= snr_db);
    n.checked_sub(1).map(|i| &table.entries[i])
}

/// Like [`select_mcs`] but moving up from `current` additionally needs
/// `hysteresis_db` of margin over the new entry's threshold. Downgrades and
/// initial link acquisition are immediate. With zero hysteresis this is
/// identical to `select_mcs`.
pub fn select_mcs_with_hysteresis(
    table: &McsTable,
    snr_db: f64,
    current: Option<u32>,
    hysteresis_db: f64,
) -> Option<&McsEntry> {
    let plain = select_mcs(table, snr_db)?;
    let held = current.and_then(|i| table.by_index(i));
    match held {
        Some(held) if hysteresis_db > 0.0 && plain.phy_rate_bps > held.phy_rate_bps => {
            // `held` still holds because plain is above it.
            match select_mcs(table, snr_db - hysteresis_db) {
                Some(m) if m.phy_rate_bps > held.phy_rate_bps => Some(m),
                _ => Some(held),
            }
        }
        _ => Some(plain),
    }
}

/// Radio hardware profile of one end of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioHardware {
    pub antenna_gain_dbi: f64,
    /// Horizontal scan half-width (deg).
    pub scan_az_deg: f64,
    /// Vertical scan half-width (deg).
    pub scan_el_deg: f64,
    pub max_throughput_bps: f64,
}

impl RadioHardware {
    /// Lens antenna: 25.4 dBi, +/-13.5 deg by +/-7 deg scan, 1.5 Gbit/s device ceiling.
    pub fn lens() -> Self {
        Self { antenna_gain_dbi: 25.4, scan_az_deg: 13.5, scan_el_deg: 7.0, max_throughput_bps: 1.5e9 }
    }

    /// Bare phased array: 17.5 dBi, +/-49 deg by +/-19.5 deg scan.
    pub fn array() -> Self {
        Self { antenna_gain_dbi: 17.5, scan_az_deg: 49.0, scan_el_deg: 19.5, max_throughput_bps: 1.5e9 }
    }

    pub fn validate(&self, which: &'static str) -> Result<()> {
        if !self.antenna_gain_dbi.is_finite() {
            return Err(Error::invalid(which, "antenna_gain_dbi must be finite"));
        }
        if !(self.scan_az_deg > 0.0) || !(self.scan_el_deg > 0.0) {
            return Err(Error::invalid(which, "scan half-widths must be > 0"));
        }
        if !(self.max_throughput_bps > 0.0) {
            return Err(Error::invalid(which, "max_throughput_bps must be > 0"));
        }
        Ok(())
    }
}

/// Usable rate: the PHY rate capped by the device ceiling, 0 without a link.
pub fn capacity_bps(entry: Option<&McsEntry>, hardware: &RadioHardware) -> f64 {
    match entry {
        None => 0.0,
        Some(e) => e.phy_rate_bps.min(hardware.max_throughput_bps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(index: u32, snr: f64, rate: f64) -> McsEntry {
        McsEntry { index, label: format!("MCS{index}"), min_snr_db: snr, phy_rate_bps: rate }
    }

    fn linear_scan(table: &McsTable, snr: f64) -> Option<&McsEntry> {
        let mut best: Option<&McsEntry> = None;
        for e in table.entries() {
            if e.min_snr_db <= snr && best.is_none_or(|b| e.min_snr_db > b.min_snr_db) {
                best = Some(e);
            }
        }
        best
    }

    #[test]
    fn loads_single_row() {
        let t = load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n12,16QAM 3/4,21,4620\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries()[0].phy_rate_bps, 4.62e9);
    }

    #[test]
    fn loads_with_comments() {
        let src = "# comment\nindex,label,min_snr_db,phy_rate_mbps\n# another\n1,BPSK,6,385\n2,BPSK,7,770\n";
        let t = load_mcs_table(src).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n").is_err());
        assert!(load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n1,a,5,100\n2,b,5,200\n").is_err());
        assert!(load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n1,a,5,200\n2,b,6,100\n").is_err());
        assert!(load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n1,a,5,0\n").is_err());
        assert!(load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n1,a,5,100\n1,b,6,200\n").is_err());
        assert!(load_mcs_table("idx,label,snr,rate\n1,a,5,100\n").is_err());
        assert!(load_mcs_table("index,label,min_snr_db,phy_rate_mbps\n1,a,x,100\n").is_err());
    }

    #[test]
    fn selection_examples() {
        let t = McsTable::new(vec![entry(11, 20.0, 3.85e9), entry(12, 21.0, 4.62e9)]).unwrap();
        assert_eq!(select_mcs(&t, 21.0).unwrap().index, 12);
        assert_eq!(select_mcs(&t, 20.999).unwrap().index, 11);
        assert!(select_mcs(&t, -100.0).is_none());
        assert_eq!(select_mcs(&t, 1e300).unwrap().index, 12);
    }

    #[test]
    fn capacity_examples() {
        let lens = RadioHardware::lens();
        assert_eq!(capacity_bps(Some(&entry(12, 21.0, 4.62e9)), &lens), 1.5e9);
        assert_eq!(capacity_bps(None, &lens), 0.0);
        assert_eq!(capacity_bps(Some(&entry(3, 9.0, 1.0e9)), &lens), 1.0e9);
    }

    #[test]
    fn hysteresis_delays_upgrade_only() {
        let t = McsTable::new(vec![entry(1, 5.0, 1e8), entry(2, 10.0, 2e8), entry(3, 15.0, 3e8)]).unwrap();
        // Sitting at MCS 1, 11 dB is above MCS 2 but within the 2 dB margin.
        assert_eq!(select_mcs_with_hysteresis(&t, 11.0, Some(1), 2.0).unwrap().index, 1);
        assert_eq!(select_mcs_with_hysteresis(&t, 12.0, Some(1), 2.0).unwrap().index, 2);
        // Downgrade is immediate.
        assert_eq!(select_mcs_with_hysteresis(&t, 9.0, Some(3), 2.0).unwrap().index, 1);
        // Holding MCS 3 at 15.5 dB.
        assert_eq!(select_mcs_with_hysteresis(&t, 15.5, Some(3), 2.0).unwrap().index, 3);
        assert_eq!(select_mcs_with_hysteresis(&t, 11.0, Some(1), 0.0).unwrap().index, 2);
    }

    fn table_strategy() -> impl Strategy<Value = McsTable> {
        prop::collection::vec((0.01..5.0f64, 1e6..1e9f64), 1..16).prop_flat_map(|steps| {
            (Just(steps), -20.0..20.0f64).prop_map(|(steps, start)| {
                let mut snr = start;
                let mut rate = 0.0;
                let entries = steps
                    .iter()
                    .enumerate()
                    .map(|(i, (ds, dr))| {
                        snr += ds;
                        rate += dr;
                        entry(i as u32 + 1, snr, rate)
                    })
                    .collect();
                McsTable::new(entries).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn select_matches_linear_scan(t in table_strategy(), snr in -40.0..100.0f64) {
            prop_assert_eq!(select_mcs(&t, snr), linear_scan(&t, snr));
            // Exact thresholds are inclusive.
            for e in t.entries() {
                prop_assert_eq!(select_mcs(&t, e.min_snr_db).unwrap().index, e.index);
            }
        }

        #[test]
        fn selection_is_monotone(t in table_strategy(), a in -40.0..100.0f64, b in -40.0..100.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let hw = RadioHardware { max_throughput_bps: f64::INFINITY, ..RadioHardware::lens() };
            prop_assert!(capacity_bps(select_mcs(&t, lo), &hw) <= capacity_bps(select_mcs(&t, hi), &hw));
        }

        #[test]
        fn capacity_never_exceeds_ceiling(t in table_strategy(), snr in -40.0..100.0f64, cap in 1e6..5e9f64) {
            let hw = RadioHardware { max_throughput_bps: cap, ..RadioHardware::lens() };
            prop_assert!(capacity_bps(select_mcs(&t, snr), &hw) <= cap);
        }
    }
}
