//! PLY reader and writer for colored voxel clouds.
//!
//! Reads ASCII and binary little-endian files. Only the `vertex` element is
//! interpreted; other elements are parsed and skipped. Coordinates may be
//! stored as any scalar type but must hold integral values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{min_depth, Voxel, VoxelCloud};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            other => return Err(Error::PlyHeader(format!("unknown scalar type `{other}`"))),
        })
    }

    fn read_le<R: Read>(self, r: &mut R) -> Result<f64> {
        let mut buf = [0u8; 8];
        let n = match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        };
        r.read_exact(&mut buf[..n]).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::PlyBody("unexpected end of file".into()),
            _ => Error::Io(e),
        })?;
        Ok(match self {
            Self::I8 => buf[0] as i8 as f64,
            Self::U8 => buf[0] as f64,
            Self::I16 => i16::from_le_bytes([buf[0], buf[1]]) as f64,
            Self::U16 => u16::from_le_bytes([buf[0], buf[1]]) as f64,
            Self::I32 => i32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Self::U32 => u32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Self::F32 => f32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Self::F64 => f64::from_le_bytes(buf),
        })
    }
}

#[derive(Clone, Debug)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { count: Scalar, item: Scalar },
}

#[derive(Clone, Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug)]
struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
}

fn read_header<R: BufRead>(r: &mut R) -> Result<Header> {
    let mut line = String::new();
    let mut next_line = |r: &mut R| -> Result<String> {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::PlyHeader("missing end_header".into()));
        }
        Ok(line.trim_end_matches(['\n', '\r']).to_string())
    };

    if next_line(r)?.trim() != "ply" {
        return Err(Error::PlyHeader("missing `ply` magic".into()));
    }
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let l = next_line(r)?;
        let mut tok = l.split_whitespace();
        match tok.next() {
            None | Some("comment") | Some("obj_info") => {}
            Some("format") => {
                format = Some(match tok.next() {
                    Some("ascii") => PlyFormat::Ascii,
                    Some("binary_little_endian") => PlyFormat::BinaryLittleEndian,
                    Some(other) => return Err(Error::PlyHeader(format!("unsupported format `{other}`"))),
                    None => return Err(Error::PlyHeader("empty format line".into())),
                });
            }
            Some("element") => {
                let name = tok
                    .next()
                    .ok_or_else(|| Error::PlyHeader("element without name".into()))?;
                let count = tok
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Error::PlyHeader(format!("bad count for element `{name}`")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| Error::PlyHeader("property before any element".into()))?;
                let ty = tok
                    .next()
                    .ok_or_else(|| Error::PlyHeader("property without type".into()))?;
                let prop = if ty == "list" {
                    let count = Scalar::parse(tok.next().unwrap_or(""))?;
                    let item = Scalar::parse(tok.next().unwrap_or(""))?;
                    Property::List { count, item }
                } else {
                    let ty = Scalar::parse(ty)?;
                    let name = tok
                        .next()
                        .ok_or_else(|| Error::PlyHeader("property without name".into()))?;
                    Property::Scalar {
                        name: name.to_string(),
                        ty,
                    }
                };
                element.properties.push(prop);
            }
            Some("end_header") => break,
            Some(other) => return Err(Error::PlyHeader(format!("unexpected keyword `{other}`"))),
        }
    }
    let format = format.ok_or_else(|| Error::PlyHeader("missing format line".into()))?;
    Ok(Header { format, elements })
}

/// Streams element rows; list properties are consumed and dropped.
struct RowReader<R> {
    inner: R,
    format: PlyFormat,
    tokens: std::vec::IntoIter<String>,
}

impl<R: BufRead> RowReader<R> {
    fn next_token(&mut self) -> Result<String> {
        loop {
            if let Some(t) = self.tokens.next() {
                return Ok(t);
            }
            let mut line = String::new();
            if self.inner.read_line(&mut line)? == 0 {
                return Err(Error::PlyBody("unexpected end of file".into()));
            }
            self.tokens = line
                .split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>()
                .into_iter();
        }
    }

    fn read_scalar(&mut self, ty: Scalar) -> Result<f64> {
        match self.format {
            PlyFormat::BinaryLittleEndian => ty.read_le(&mut self.inner),
            PlyFormat::Ascii => {
                let t = self.next_token()?;
                t.parse::<f64>()
                    .map_err(|_| Error::PlyBody(format!("bad number `{t}`")))
            }
        }
    }

    fn read_row(&mut self, element: &Element, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        for p in &element.properties {
            match *p {
                Property::Scalar { ty, .. } => {
                    let v = self.read_scalar(ty)?;
                    out.push(v);
                }
                Property::List { count, item } => {
                    let n = self.read_scalar(count)?;
                    if n < 0.0 || n.fract() != 0.0 {
                        return Err(Error::PlyBody(format!("bad list length {n}")));
                    }
                    for _ in 0..n as usize {
                        self.read_scalar(item)?;
                    }
                    out.push(f64::NAN);
                }
            }
        }
        Ok(())
    }
}

fn scalar_index(element: &Element, name: &str) -> Result<usize> {
    element
        .properties
        .iter()
        .position(|p| matches!(p, Property::Scalar { name: n, .. } if n == name))
        .ok_or_else(|| Error::PlyHeader(format!("vertex element has no `{name}` property")))
}

/// Parses a colored voxel cloud from a PLY stream.
pub fn read_ply<R: BufRead>(mut r: R) -> Result<VoxelCloud> {
    let header = read_header(&mut r)?;
    if !header.elements.iter().any(|e| e.name == "vertex") {
        return Err(Error::PlyHeader("no vertex element".into()));
    }
    let mut rows = RowReader {
        inner: r,
        format: header.format,
        tokens: Vec::new().into_iter(),
    };
    let mut coords: Vec<Voxel> = Vec::new();
    let mut attrs: Vec<f64> = Vec::new();
    let mut row = Vec::new();
    for element in &header.elements {
        if element.name != "vertex" {
            for _ in 0..element.count {
                rows.read_row(element, &mut row)?;
            }
            continue;
        }
        let xyz = [
            scalar_index(element, "x")?,
            scalar_index(element, "y")?,
            scalar_index(element, "z")?,
        ];
        let rgb = [
            scalar_index(element, "red")?,
            scalar_index(element, "green")?,
            scalar_index(element, "blue")?,
        ];
        coords.reserve(element.count);
        attrs.reserve(3 * element.count);
        for index in 0..element.count {
            rows.read_row(element, &mut row)?;
            let mut v = [0u32; 3];
            for (axis, &col) in xyz.iter().enumerate() {
                let value = row[col];
                if !value.is_finite() || value.fract() != 0.0 {
                    return Err(Error::NonIntegralCoordinate { index, value });
                }
                if value < 0.0 || value >= (1u64 << 20) as f64 {
                    return Err(Error::CoordinateOutOfRange {
                        index,
                        coord: [row[xyz[0]] as i64, row[xyz[1]] as i64, row[xyz[2]] as i64],
                        depth: 20,
                    });
                }
                v[axis] = value as u32;
            }
            for &col in &rgb {
                let c = row[col];
                if !(0.0..=255.0).contains(&c) {
                    return Err(Error::PlyBody(format!("vertex {index} color {c} outside [0, 255]")));
                }
                attrs.push(c);
            }
            coords.push(v);
        }
    }
    let depth = min_depth(&coords);
    VoxelCloud::new(coords, attrs, 3, depth)
}

pub fn load_ply(path: impl AsRef<Path>) -> Result<VoxelCloud> {
    read_ply(BufReader::new(File::open(path)?))
}

fn to_u8(c: f64) -> u8 {
    c.round().clamp(0.0, 255.0) as u8
}

/// Writes a 3-channel cloud with float coordinates and uchar colors.
/// Colors are rounded and clamped.
pub fn write_ply<W: Write>(w: W, cloud: &VoxelCloud, format: PlyFormat) -> Result<()> {
    if cloud.channels() != 3 {
        return Err(Error::ChannelCount {
            expected: 3,
            got: cloud.channels(),
        });
    }
    let mut w = BufWriter::new(w);
    let fmt = match format {
        PlyFormat::Ascii => "ascii",
        PlyFormat::BinaryLittleEndian => "binary_little_endian",
    };
    write!(
        w,
        "ply\nformat {fmt} 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        cloud.len()
    )?;
    for (i, v) in cloud.coords().iter().enumerate() {
        let a = cloud.attr(i);
        match format {
            PlyFormat::Ascii => writeln!(
                w,
                "{} {} {} {} {} {}",
                v[0],
                v[1],
                v[2],
                to_u8(a[0]),
                to_u8(a[1]),
                to_u8(a[2])
            )?,
            PlyFormat::BinaryLittleEndian => {
                for &c in v {
                    w.write_all(&(c as f32).to_le_bytes())?;
                }
                w.write_all(&[to_u8(a[0]), to_u8(a[1]), to_u8(a[2])])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_ply(path: impl AsRef<Path>, cloud: &VoxelCloud, format: PlyFormat) -> Result<()> {
    write_ply(File::create(path)?, cloud, format)
}
