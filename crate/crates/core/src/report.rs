//! Serialization helpers shared by the JSON reports.

use std::fmt::Display;

use serde::Serializer;

use crate::scalar::Scalar;

pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_scalar<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.encode())
}
