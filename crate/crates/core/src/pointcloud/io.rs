//! ASCII XYZ and PLY point-cloud files.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use super::cloud::PointCloud;
use super::CloudError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    /// One `x y z` triple per line; blank lines and `#` comments are skipped.
    Xyz,
    /// ASCII PLY; only the `x`, `y`, `z` properties of `vertex` are read.
    Ply,
}

impl CloudFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "xyz" | "txt" => Some(Self::Xyz),
            "ply" => Some(Self::Ply),
            _ => None,
        }
    }

    pub fn parse(&self, text: &str) -> Result<PointCloud, CloudError> {
        match self {
            Self::Xyz => parse_xyz(text),
            Self::Ply => parse_ply(text),
        }
    }

    /// Serializes with shortest round-trip float formatting.
    pub fn format(&self, cloud: &PointCloud) -> String {
        let mut out = String::new();
        if *self == Self::Ply {
            out.push_str("ply\nformat ascii 1.0\n");
            let _ = writeln!(out, "element vertex {}", cloud.len());
            out.push_str("property double x\nproperty double y\nproperty double z\nend_header\n");
        }
        for p in cloud.points() {
            let _ = writeln!(out, "{:?} {:?} {:?}", p.x, p.y, p.z);
        }
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> CloudError {
    CloudError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64, CloudError> {
    token
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number `{token}`")))
}

fn parse_xyz(text: &str) -> Result<PointCloud, CloudError> {
    let mut points = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(k + 1, format!("expected 3 values, found {}", fields.len())));
        }
        let v = [
            parse_f64(fields[0], k + 1)?,
            parse_f64(fields[1], k + 1)?,
            parse_f64(fields[2], k + 1)?,
        ];
        points.push(Vector3::from(v));
    }
    PointCloud::new(points)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
}

fn parse_ply(text: &str) -> Result<PointCloud, CloudError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(parse_err(1, "missing `ply` magic")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    loop {
        let (k, line) = lines.next().ok_or_else(|| parse_err(0, "missing end_header"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", _] => {}
            ["format", other, ..] => {
                return Err(parse_err(k + 1, format!("unsupported PLY format `{other}`")))
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => elements.push(PlyElement {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| parse_err(k + 1, "invalid element count"))?,
                properties: Vec::new(),
            }),
            ["property", "list", ..] => {
                let e = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(k + 1, "property before element"))?;
                e.properties.push(String::new());
            }
            ["property", _ty, name] => {
                let e = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(k + 1, "property before element"))?;
                e.properties.push(name.to_string());
            }
            _ => return Err(parse_err(k + 1, format!("unrecognized header line `{line}`"))),
        }
    }

    let mut points = Vec::new();
    for element in &elements {
        let axes = if element.name == "vertex" {
            let find = |n: &str| {
                element
                    .properties
                    .iter()
                    .position(|p| p == n)
                    .ok_or_else(|| parse_err(0, format!("vertex element lacks `{n}`")))
            };
            Some([find("x")?, find("y")?, find("z")?])
        } else {
            None
        };
        for _ in 0..element.count {
            let (k, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("truncated `{}` data", element.name)))?;
            if let Some(axes) = axes {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() < element.properties.len() {
                    return Err(parse_err(k + 1, "too few vertex values"));
                }
                let [x, y, z] = axes;
                points.push(Vector3::new(
                    parse_f64(fields[x], k + 1)?,
                    parse_f64(fields[y], k + 1)?,
                    parse_f64(fields[z], k + 1)?,
                ));
            }
        }
    }
    PointCloud::new(points)
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud, CloudError> {
    let path = path.as_ref();
    let format = CloudFormat::from_path(path).unwrap_or(CloudFormat::Xyz);
    format.parse(&std::fs::read_to_string(path)?)
}

pub fn write_cloud(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<(), CloudError> {
    let path = path.as_ref();
    let format = CloudFormat::from_path(path).unwrap_or(CloudFormat::Xyz);
    std::fs::write(path, format.format(cloud))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_round_trip_is_exact() {
        let cloud = PointCloud::from_rows(&[
            [0.1, -2.5e-17, 3.0],
            [1.0 / 3.0, 1e300, -0.0],
        ])
        .unwrap();
        let text = CloudFormat::Xyz.format(&cloud);
        assert_eq!(CloudFormat::Xyz.parse(&text).unwrap(), cloud);
    }

    #[test]
    fn xyz_skips_comments_and_reports_bad_lines() {
        let cloud = CloudFormat::Xyz.parse("# header\n1 2 3\n\n4 5 6 # tail\n").unwrap();
        assert_eq!(cloud.rows(), vec![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        assert!(matches!(
            CloudFormat::Xyz.parse("1 2 3\n1 2\n"),
            Err(CloudError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            CloudFormat::Xyz.parse("1 2 x\n"),
            Err(CloudError::Parse { line: 1, .. })
        ));
        assert!(matches!(CloudFormat::Xyz.parse(""), Err(CloudError::Empty)));
    }

    #[test]
    fn ply_reads_vertices_among_other_elements() {
        let text = "ply\nformat ascii 1.0\ncomment made by hand\n\
            element camera 1\nproperty float f\n\
            element vertex 2\nproperty float nx\nproperty float z\nproperty float y\nproperty float x\n\
            element face 1\nproperty list uchar int vertex_indices\nend_header\n\
            9\n\
            0 3 2 1\n\
            0 6 5 4\n\
            3 0 1 1\n";
        let cloud = CloudFormat::Ply.parse(text).unwrap();
        assert_eq!(cloud.rows(), vec![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
    }

    #[test]
    fn ply_round_trip_and_errors() {
        let cloud = PointCloud::from_rows(&[[1.5, -2.0, 0.25]; 4]).unwrap();
        let text = CloudFormat::Ply.format(&cloud);
        assert_eq!(CloudFormat::Ply.parse(&text).unwrap(), cloud);
        assert!(CloudFormat::Ply.parse("ply\nformat binary_little_endian 1.0\nend_header\n").is_err());
        assert!(CloudFormat::Ply.parse("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n").is_err());
    }
}
