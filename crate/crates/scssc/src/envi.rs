//! ENVI scenes: a `key = value` text header next to a raw binary payload.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use scssc_core::cube::SpectralCube;
use scssc_core::Geometry;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    Bsq,
    Bil,
    Bip,
}

impl Interleave {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bsq" => Some(Self::Bsq),
            "bil" => Some(Self::Bil),
            "bip" => Some(Self::Bip),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Bsq => "bsq",
            Self::Bil => "bil",
            Self::Bip => "bip",
        }
    }

    /// Payload position of sample `(line, sample, band)`.
    fn offset(
        self,
        line: usize,
        sample: usize,
        band: usize,
        lines: usize,
        samples: usize,
        bands: usize,
    ) -> usize {
        match self {
            Self::Bsq => (band * lines + line) * samples + sample,
            Self::Bil => (line * bands + band) * samples + sample,
            Self::Bip => (line * samples + sample) * bands + band,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    Int16,
    Float32,
    Float64,
    Uint16,
}

impl DataType {
    fn from_code(code: u32) -> Option<Self> {
        match code {
            2 => Some(Self::Int16),
            4 => Some(Self::Float32),
            5 => Some(Self::Float64),
            12 => Some(Self::Uint16),
            _ => None,
        }
    }

    fn code(self) -> u32 {
        match self {
            Self::Int16 => 2,
            Self::Float32 => 4,
            Self::Float64 => 5,
            Self::Uint16 => 12,
        }
    }

    pub fn size(self) -> usize {
        match self {
            Self::Int16 | Self::Uint16 => 2,
            Self::Float32 => 4,
            Self::Float64 => 8,
        }
    }

    fn decode(self, b: &[u8], big: bool) -> f64 {
        macro_rules! read {
            ($t:ty, $n:literal) => {{
                let a: [u8; $n] = b.try_into().expect("sized by caller");
                (if big {
                    <$t>::from_be_bytes(a)
                } else {
                    <$t>::from_le_bytes(a)
                }) as f64
            }};
        }
        match self {
            Self::Int16 => read!(i16, 2),
            Self::Uint16 => read!(u16, 2),
            Self::Float32 => read!(f32, 4),
            Self::Float64 => read!(f64, 8),
        }
    }

    fn encode(self, v: f64, big: bool, out: &mut Vec<u8>) {
        macro_rules! write {
            ($x:expr) => {{
                let x = $x;
                out.extend_from_slice(&if big {
                    x.to_be_bytes()
                } else {
                    x.to_le_bytes()
                })
            }};
        }
        match self {
            Self::Int16 => write!(v as i16),
            Self::Uint16 => write!(v as u16),
            Self::Float32 => write!(v as f32),
            Self::Float64 => write!(v),
        }
    }
}

/// Payload layout of an ENVI file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnviFormat {
    pub interleave: Interleave,
    pub data_type: DataType,
    pub big_endian: bool,
}

impl Default for EnviFormat {
    fn default() -> Self {
        Self {
            interleave: Interleave::Bsq,
            data_type: DataType::Float32,
            big_endian: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnviHeader {
    pub samples: usize,
    pub lines: usize,
    pub bands: usize,
    pub header_offset: usize,
    pub format: EnviFormat,
    pub wavelengths: Option<Vec<f64>>,
    pub data_file: Option<PathBuf>,
}

/// Splits header text into lower-cased keys and raw values; braces may span lines.
fn header_fields(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l.trim() == "ENVI" => {}
        _ => return Err(Error::format(path, "header does not start with ENVI")),
    }
    let mut fields = BTreeMap::new();
    let mut pending: Option<(String, String)> = None;
    for line in lines {
        if let Some((key, mut value)) = pending.take() {
            value.push(' ');
            value.push_str(line.trim());
            if value.contains('}') {
                fields.insert(key, value);
            } else {
                pending = Some((key, value));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if value.starts_with('{') && !value.contains('}') {
            pending = Some((key, value));
        } else {
            fields.insert(key, value);
        }
    }
    if pending.is_some() {
        return Err(Error::format(path, "unterminated brace in header"));
    }
    Ok(fields)
}

pub fn parse_header(text: &str, path: &Path) -> Result<EnviHeader> {
    let fields = header_fields(text, path)?;
    let count = |key: &str| -> Result<usize> {
        let v = fields
            .get(key)
            .ok_or_else(|| Error::format(path, format!("missing `{key}`")))?;
        v.parse()
            .map_err(|_| Error::format(path, format!("`{key}` is not a count: {v}")))
    };
    let (samples, lines, bands) = (count("samples")?, count("lines")?, count("bands")?);
    if samples == 0 || lines == 0 || bands == 0 {
        return Err(Error::format(
            path,
            "samples, lines and bands must be positive",
        ));
    }
    let header_offset = if fields.contains_key("header offset") {
        count("header offset")?
    } else {
        0
    };
    let code = count("data type")? as u32;
    let data_type = DataType::from_code(code)
        .ok_or_else(|| Error::format(path, format!("unsupported data type {code}")))?;
    let interleave = match fields.get("interleave") {
        Some(v) => Interleave::parse(v)
            .ok_or_else(|| Error::format(path, format!("unknown interleave `{v}`")))?,
        None => return Err(Error::format(path, "missing `interleave`")),
    };
    let big_endian = match fields.get("byte order").map(String::as_str) {
        None | Some("0") => false,
        Some("1") => true,
        Some(v) => {
            return Err(Error::format(
                path,
                format!("byte order must be 0 or 1, got {v}"),
            ))
        }
    };
    let wavelengths = match fields.get("wavelength") {
        Some(v) => {
            let list: std::result::Result<Vec<f64>, _> = v
                .trim_matches(|c| c == '{' || c == '}' || char::is_whitespace(c))
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect();
            let list = list.map_err(|_| Error::format(path, "malformed wavelength list"))?;
            if list.len() != bands {
                return Err(Error::format(
                    path,
                    format!("{} wavelengths for {bands} bands", list.len()),
                ));
            }
            Some(list)
        }
        None => None,
    };
    Ok(EnviHeader {
        samples,
        lines,
        bands,
        header_offset,
        format: EnviFormat {
            interleave,
            data_type,
            big_endian,
        },
        wavelengths,
        data_file: fields.get("data file").map(PathBuf::from),
    })
}

/// Payload next to `header_path`: an explicit `data file`, the header path
/// without its extension, or the same stem with a common raster extension.
fn payload_path(header_path: &Path, header: &EnviHeader) -> Result<PathBuf> {
    let dir = header_path.parent().unwrap_or(Path::new(""));
    if let Some(p) = &header.data_file {
        return Ok(if p.is_absolute() {
            p.clone()
        } else {
            dir.join(p)
        });
    }
    let stem = header_path.with_extension("");
    let mut candidates = vec![stem.clone()];
    for ext in ["img", "raw", "dat", "bsq", "bil", "bip"] {
        candidates.push(stem.with_extension(ext));
    }
    candidates
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| Error::format(header_path, "no data file found next to the header"))
}

fn read_header(header_path: &Path) -> Result<EnviHeader> {
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    parse_header(&text, header_path)
}

/// Loads a scene; integer payloads are converted without scaling.
pub fn load_envi(header_path: &Path) -> Result<(SpectralCube, EnviFormat)> {
    let header = read_header(header_path)?;
    let data_path = payload_path(header_path, &header)?;
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let (lines, samples, bands) = (header.lines, header.samples, header.bands);
    let size = header.format.data_type.size();
    let expected = header.header_offset + lines * samples * bands * size;
    if bytes.len() != expected {
        return Err(Error::format(
            &data_path,
            format!(
                "payload has {} bytes but the header implies {expected}",
                bytes.len()
            ),
        ));
    }
    let payload = &bytes[header.header_offset..];
    let f = header.format;
    let geometry = Geometry::new(lines, samples)?;
    let mut values = Vec::with_capacity(lines * samples * bands);
    for j in 0..geometry.len() {
        let (r, c) = geometry.unindex(j);
        for b in 0..bands {
            let at = f.interleave.offset(r, c, b, lines, samples, bands) * size;
            values.push(f.data_type.decode(&payload[at..at + size], f.big_endian));
        }
    }
    let mut cube = SpectralCube::new(geometry, bands, values).map_err(|e| match e {
        scssc_core::Error::NonFinite(i) => {
            Error::format(&data_path, format!("non-finite value at sample {i}"))
        }
        e => e.into(),
    })?;
    if let Some(w) = header.wavelengths {
        cube = cube.with_wavelengths(w)?;
    }
    Ok((cube, f))
}

fn header_text(cube: &SpectralCube, format: EnviFormat, data_file: Option<&str>) -> String {
    let g = cube.geometry();
    let mut s = format!(
        "ENVI\nsamples = {}\nlines = {}\nbands = {}\nheader offset = 0\nfile type = ENVI Standard\ndata type = {}\ninterleave = {}\nbyte order = {}\n",
        g.cols,
        g.rows,
        cube.bands(),
        format.data_type.code(),
        format.interleave.name(),
        u8::from(format.big_endian)
    );
    if let Some(d) = data_file {
        s.push_str(&format!("data file = {d}\n"));
    }
    if let Some(w) = cube.wavelengths() {
        let list: Vec<String> = w.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&format!("wavelength = {{{}}}\n", list.join(", ")));
    }
    s
}

/// Raw payload bytes of `cube` in the given layout.
pub fn encode_payload(cube: &SpectralCube, format: EnviFormat) -> Vec<u8> {
    let g = cube.geometry();
    let (lines, samples, bands) = (g.rows, g.cols, cube.bands());
    let mut order = vec![(0, 0, 0); lines * samples * bands];
    for r in 0..lines {
        for c in 0..samples {
            for b in 0..bands {
                order[format.interleave.offset(r, c, b, lines, samples, bands)] = (r, c, b);
            }
        }
    }
    let mut out = Vec::with_capacity(order.len() * format.data_type.size());
    for (r, c, b) in order {
        format
            .data_type
            .encode(cube.value(r, c, b), format.big_endian, &mut out);
    }
    out
}

/// Writes `<stem>.hdr` and the payload `<stem>.img`; returns the header path.
pub fn write_envi(stem: &Path, cube: &SpectralCube, format: EnviFormat) -> Result<PathBuf> {
    let header_path = stem.with_extension("hdr");
    let data_path = stem.with_extension("img");
    fs::write(&data_path, encode_payload(cube, format)).map_err(|e| Error::io(&data_path, e))?;
    let name = data_path.file_name().and_then(|n| n.to_str());
    fs::write(&header_path, header_text(cube, format, name))
        .map_err(|e| Error::io(&header_path, e))?;
    Ok(header_path)
}
