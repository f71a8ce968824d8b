//! Bank/ATM location data (`name,east,south` CSV).

use std::io::Read;

use serde::{Deserialize, Serialize};

const SALT_LAKE_CSV: &str = include_str!("../../data/salt_lake_atms.csv");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtmLocation {
    pub name: String,
    pub east: u64,
    pub south: u64,
}

pub fn load_atm_csv<R: Read>(reader: R) -> Result<Vec<AtmLocation>, csv::Error> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader).deserialize().collect()
}

/// The ten downtown Salt Lake City Chase and Wells Fargo locations.
pub fn salt_lake_atms() -> Vec<AtmLocation> {
    load_atm_csv(SALT_LAKE_CSV.as_bytes()).expect("bundled ATM table parses")
}

pub fn salt_lake_locations() -> Vec<(u64, u64)> {
    salt_lake_atms().iter().map(|a| (a.east, a.south)).collect()
}

/// Plaintext nearest location; ties go to the earliest row.
pub fn nearest_plain(atms: &[AtmLocation], east: u64, south: u64) -> Option<(usize, u64)> {
    atms.iter().map(|a| a.east.abs_diff(east) + a.south.abs_diff(south)).enumerate().min_by_key(|&(i, d)| (d, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_has_ten_rows() {
        let atms = salt_lake_atms();
        assert_eq!(atms.len(), 10);
        assert_eq!(atms[6], AtmLocation { name: "Wells Fargo".into(), east: 0, south: 79 });
    }

    #[test]
    fn origin_is_closest_to_wells_fargo_79_south() {
        let atms = salt_lake_atms();
        let (i, d) = nearest_plain(&atms, 0, 0).unwrap();
        assert_eq!((atms[i].name.as_str(), atms[i].south, d), ("Wells Fargo", 79, 79));
    }

    #[test]
    fn malformed_csv_is_an_error() {
        assert!(load_atm_csv("name,east,south\nX,notanumber,3\n".as_bytes()).is_err());
    }
}
