use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A UTC instant with microsecond precision.
///
/// Inputs without an offset are read as UTC. The text form is
/// `YYYY-MM-DDTHH:MM:SS[.ffffff]Z` with trailing fractional zeros removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid ISO 8601 timestamp `{0}`")]
pub struct TimestampError(pub String);

impl Timestamp {
    pub const fn from_micros(micros: i64) -> Self {
        Timestamp(micros)
    }

    pub const fn as_micros(self) -> i64 {
        self.0
    }

    pub fn parse(s: &str) -> Result<Self, TimestampError> {
        let err = || TimestampError(s.to_string());
        let s = s.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Ok(Timestamp(dt.timestamp_micros()));
        }
        for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                return Ok(Timestamp(naive.and_utc().timestamp_micros()));
            }
        }
        if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            let naive = date.and_hms_opt(0, 0, 0).ok_or_else(err)?;
            return Ok(Timestamp(naive.and_utc().timestamp_micros()));
        }
        Err(err())
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let secs = self.0.div_euclid(1_000_000);
        let micros = self.0.rem_euclid(1_000_000);
        let dt = DateTime::from_timestamp(secs, 0).ok_or(fmt::Error)?;
        write!(f, "{}", dt.format("%Y-%m-%dT%H:%M:%S"))?;
        if micros != 0 {
            let frac = format!("{micros:06}");
            write!(f, ".{}", frac.trim_end_matches('0'))?;
        }
        f.write_str("Z")
    }
}

impl FromStr for Timestamp {
    type Err = TimestampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Timestamp::parse(s)
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Timestamp::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_inputs_are_utc() {
        let t = Timestamp::parse("2021-03-04T05:06:07").unwrap();
        assert_eq!(t.to_string(), "2021-03-04T05:06:07Z");
        assert_eq!(Timestamp::parse("2021-03-04 05:06:07").unwrap(), t);
    }

    #[test]
    fn offsets_are_normalized() {
        let t = Timestamp::parse("2021-03-04T07:06:07+02:00").unwrap();
        assert_eq!(t.to_string(), "2021-03-04T05:06:07Z");
    }

    #[test]
    fn microseconds_survive_and_trailing_zeros_drop() {
        let t = Timestamp::parse("2021-03-04T05:06:07.120000Z").unwrap();
        assert_eq!(t.to_string(), "2021-03-04T05:06:07.12Z");
        let t = Timestamp::parse("2021-03-04T05:06:07.000001").unwrap();
        assert_eq!(t.to_string(), "2021-03-04T05:06:07.000001Z");
        assert_eq!(Timestamp::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn pre_epoch_instants() {
        let t = Timestamp::from_micros(-1);
        assert_eq!(t.to_string(), "1969-12-31T23:59:59.999999Z");
        assert_eq!(Timestamp::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn date_only_is_midnight() {
        assert_eq!(
            Timestamp::parse("2020-02-29").unwrap().to_string(),
            "2020-02-29T00:00:00Z"
        );
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(Timestamp::parse("admission").is_err());
        assert!(Timestamp::parse("2020-13-01T00:00:00").is_err());
    }
}
