//! ASCII OFF and PLY loaders.
//!
//! Both parsers validate face arity (triangles only) and index ranges while
//! line numbers are still known, then hand off to `Mesh::new`, which prunes
//! isolated vertices and enforces connectivity.

use std::path::Path;

use crate::error::{Error, Result};

use super::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    PlyAscii,
}

impl MeshFormat {
    /// Infers the format from the file extension (`.off` / `.ply`).
    pub fn from_path(path: &Path) -> Result<MeshFormat> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("ply") => Ok(MeshFormat::PlyAscii),
            other => Err(Error::parse(
                Some(path.to_path_buf()),
                None,
                format!("cannot infer mesh format from extension {other:?}"),
            )),
        }
    }
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<Mesh> {
    let (vertices, faces) = parse_file(path, format)?;
    Mesh::new(vertices, faces, None)
}

/// Loads a mesh plus a side-label file (one 0/1 per line, vertex order
/// matching the mesh file before pruning). Labels of pruned vertices are
/// dropped alongside them.
pub fn load_mesh_with_labels(path: &Path, format: MeshFormat, labels: &Path) -> Result<Mesh> {
    let (vertices, faces) = parse_file(path, format)?;
    let side = read_side_labels(labels)?;
    if side.len() != vertices.len() {
        return Err(Error::parse(
            Some(labels.to_path_buf()),
            None,
            format!("{} labels for {} mesh vertices", side.len(), vertices.len()),
        ));
    }
    Mesh::new(vertices, faces, Some(side))
}

/// Writes a mesh as ASCII OFF. Side labels are not part of the format and,
/// when present, go to a sibling file via `write_side_labels`.
pub fn write_off(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} 0\n", mesh.n(), mesh.faces().len()));
    for v in mesh.vertices() {
        out.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
    }
    for f in mesh.faces() {
        out.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a side-label file: one value in {0,1} per non-empty line.
pub fn read_side_labels(path: &Path) -> Result<Vec<u8>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "0" => labels.push(0),
            "1" => labels.push(1),
            other => {
                return Err(Error::parse(
                    Some(path.to_path_buf()),
                    Some(idx + 1),
                    format!("side label must be 0 or 1, got `{other}`"),
                ))
            }
        }
    }
    Ok(labels)
}

type RawMesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

fn parse_file(path: &Path, format: MeshFormat) -> Result<RawMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        MeshFormat::Off => parse_off(path, &text),
        MeshFormat::PlyAscii => parse_ply(path, &text),
    }
}

/// 1-based line numbers of non-blank, non-comment lines.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        Lines { inner: text.lines().enumerate() }
    }

    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.inner.by_ref() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((idx + 1, trimmed));
        }
        None
    }
}

fn err(path: &Path, line: Option<usize>, msg: impl Into<String>) -> Error {
    Error::parse(Some(path.to_path_buf()), line, msg)
}

fn parse_f64(path: &Path, line: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| err(path, Some(line), format!("expected a number, got `{token}`")))?;
    if !v.is_finite() {
        return Err(err(path, Some(line), format!("non-finite coordinate `{token}`")));
    }
    Ok(v)
}

fn parse_usize(path: &Path, line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| err(path, Some(line), format!("expected a non-negative integer, got `{token}`")))
}

fn parse_vertex_line(path: &Path, line: usize, text: &str, cols: [usize; 3]) -> Result<[f64; 3]> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let max_col = cols.iter().copied().max().unwrap();
    if tokens.len() <= max_col {
        return Err(err(
            path,
            Some(line),
            format!("vertex line has {} fields, expected at least {}", tokens.len(), max_col + 1),
        ));
    }
    Ok([
        parse_f64(path, line, tokens[cols[0]])?,
        parse_f64(path, line, tokens[cols[1]])?,
        parse_f64(path, line, tokens[cols[2]])?,
    ])
}

fn parse_face_line(path: &Path, line: usize, text: &str, num_vertices: usize) -> Result<[usize; 3]> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(err(path, Some(line), "empty face line"));
    }
    let arity = parse_usize(path, line, tokens[0])?;
    if arity != 3 {
        return Err(err(
            path,
            Some(line),
            format!("only triangular faces are supported, got a {arity}-gon"),
        ));
    }
    if tokens.len() < 4 {
        return Err(err(path, Some(line), "face line is missing vertex indices"));
    }
    let mut face = [0usize; 3];
    for (slot, token) in face.iter_mut().zip(&tokens[1..4]) {
        let idx = parse_usize(path, line, token)?;
        if idx >= num_vertices {
            return Err(err(
                path,
                Some(line),
                format!("face references vertex {idx}, but only {num_vertices} vertices exist"),
            ));
        }
        *slot = idx;
    }
    if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
        return Err(err(path, Some(line), "face repeats a vertex index"));
    }
    Ok(face)
}

fn parse_off(path: &Path, text: &str) -> Result<RawMesh> {
    let mut lines = Lines::new(text);
    let (hline, header) = lines
        .next_content()
        .ok_or_else(|| err(path, None, "empty OFF file"))?;
    if header != "OFF" {
        return Err(err(path, Some(hline), format!("expected OFF header, got `{header}`")));
    }
    let (cline, counts) = lines
        .next_content()
        .ok_or_else(|| err(path, None, "missing OFF counts line"))?;
    let tokens: Vec<&str> = counts.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err(err(path, Some(cline), "counts line needs vertex and face counts"));
    }
    let num_vertices = parse_usize(path, cline, tokens[0])?;
    let num_faces = parse_usize(path, cline, tokens[1])?;

    let mut vertices = Vec::with_capacity(num_vertices);
    for _ in 0..num_vertices {
        let (lno, line) = lines
            .next_content()
            .ok_or_else(|| err(path, None, "file ends before all vertices are read"))?;
        vertices.push(parse_vertex_line(path, lno, line, [0, 1, 2])?);
    }
    let mut faces = Vec::with_capacity(num_faces);
    for _ in 0..num_faces {
        let (lno, line) = lines
            .next_content()
            .ok_or_else(|| err(path, None, "file ends before all faces are read"))?;
        faces.push(parse_face_line(path, lno, line, num_vertices)?);
    }
    Ok((vertices, faces))
}

fn parse_ply(path: &Path, text: &str) -> Result<RawMesh> {
    let mut lines = Lines::new(text);
    let (hline, magic) = lines
        .next_content()
        .ok_or_else(|| err(path, None, "empty PLY file"))?;
    if magic != "ply" {
        return Err(err(path, Some(hline), format!("expected `ply` magic, got `{magic}`")));
    }

    // (name, count); vertex/face recognized, others rejected if non-empty.
    let mut elements: Vec<(String, usize)> = Vec::new();
    let mut vertex_props: Vec<String> = Vec::new();
    let mut face_first_prop_is_list = false;
    let mut saw_format = false;

    loop {
        let (lno, line) = lines
            .next_content()
            .ok_or_else(|| err(path, None, "header ends before end_header"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "end_header" => break,
            "comment" | "obj_info" => {}
            "format" => {
                if tokens.get(1) != Some(&"ascii") {
                    return Err(err(path, Some(lno), "only ascii PLY is supported"));
                }
                saw_format = true;
            }
            "element" => {
                if tokens.len() < 3 {
                    return Err(err(path, Some(lno), "malformed element declaration"));
                }
                let count = parse_usize(path, lno, tokens[2])?;
                elements.push((tokens[1].to_string(), count));
            }
            "property" => {
                let current = elements
                    .last()
                    .ok_or_else(|| err(path, Some(lno), "property before any element"))?
                    .0
                    .clone();
                if current == "vertex" {
                    if tokens.get(1) == Some(&"list") {
                        return Err(err(
                            path,
                            Some(lno),
                            "list properties on vertices are not supported",
                        ));
                    }
                    let name = tokens
                        .last()
                        .ok_or_else(|| err(path, Some(lno), "malformed property"))?;
                    vertex_props.push((*name).to_string());
                } else if current == "face" && !face_first_prop_is_list {
                    if tokens.get(1) != Some(&"list") {
                        return Err(err(
                            path,
                            Some(lno),
                            "first face property must be a vertex-index list",
                        ));
                    }
                    face_first_prop_is_list = true;
                }
            }
            other => {
                return Err(err(path, Some(lno), format!("unexpected header keyword `{other}`")));
            }
        }
    }
    if !saw_format {
        return Err(err(path, None, "missing PLY format declaration"));
    }

    let col = |name: &str| vertex_props.iter().position(|p| p == name);
    let cols = match (col("x"), col("y"), col("z")) {
        (Some(x), Some(y), Some(z)) => [x, y, z],
        _ => return Err(err(path, None, "vertex element must declare x, y, z properties")),
    };

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut num_vertices = 0usize;
    for (name, count) in &elements {
        match name.as_str() {
            "vertex" => {
                num_vertices = *count;
                vertices.reserve(*count);
                for _ in 0..*count {
                    let (lno, line) = lines
                        .next_content()
                        .ok_or_else(|| err(path, None, "file ends before all vertices are read"))?;
                    vertices.push(parse_vertex_line(path, lno, line, cols)?);
                }
            }
            "face" => {
                if !face_first_prop_is_list && *count > 0 {
                    return Err(err(path, None, "face element has no vertex-index list property"));
                }
                faces.reserve(*count);
                for _ in 0..*count {
                    let (lno, line) = lines
                        .next_content()
                        .ok_or_else(|| err(path, None, "file ends before all faces are read"))?;
                    faces.push(parse_face_line(path, lno, line, num_vertices)?);
                }
            }
            other if *count > 0 => {
                return Err(err(path, None, format!("unsupported element `{other}`")));
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(path: &Path, text: &str) {
        std::fs::write(path, text).unwrap();
    }

    #[test]
    fn smallest_off_mesh_loads() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tri.off");
        write(&p, "OFF\n3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
        let m = load_mesh(&p, MeshFormat::Off).unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.faces().len(), 1);
    }

    #[test]
    fn off_isolated_vertex_is_pruned() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tri.off");
        write(&p, "OFF\n4 1 3\n0 0 0\n1 0 0\n0 1 0\n9 9 9\n3 0 1 2\n");
        let m = load_mesh(&p, MeshFormat::Off).unwrap();
        assert_eq!(m.n(), 3);
    }

    #[test]
    fn off_comments_and_blanks_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tri.off");
        write(&p, "OFF\n# a comment\n\n3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
        assert_eq!(load_mesh(&p, MeshFormat::Off).unwrap().n(), 3);
    }

    #[test]
    fn ply_two_disconnected_triangles_report_components() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("two.ply");
        write(
            &p,
            "ply\nformat ascii 1.0\nelement vertex 6\nproperty float x\nproperty float y\nproperty float z\nelement face 2\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n5 0 0\n6 0 0\n5 1 0\n3 0 1 2\n3 3 4 5\n",
        );
        let errmsg = load_mesh(&p, MeshFormat::PlyAscii).unwrap_err().to_string();
        assert!(errmsg.contains("2 components"), "{errmsg}");
    }

    #[test]
    fn ply_respects_property_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("swizzled.ply");
        // z declared first: columns must be read by name, not position.
        write(
            &p,
            "ply\nformat ascii 1.0\nelement vertex 3\nproperty float z\nproperty float x\nproperty float y\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n7 0 0\n7 1 0\n7 0 1\n3 0 1 2\n",
        );
        let m = load_mesh(&p, MeshFormat::PlyAscii).unwrap();
        assert_eq!(m.vertices()[0], [0.0, 0.0, 7.0]);
    }

    #[test]
    fn malformed_files_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.off");
        write(&p, "OFF\n3 1 3\n0 0 0\n1 0 zzz\n0 1 0\n3 0 1 2\n");
        let msg = load_mesh(&p, MeshFormat::Off).unwrap_err().to_string();
        assert!(msg.contains("line 4"), "{msg}");

        let p2 = dir.path().join("quad.off");
        write(&p2, "OFF\n4 1 4\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
        let msg = load_mesh(&p2, MeshFormat::Off).unwrap_err().to_string();
        assert!(msg.contains("triangular"), "{msg}");

        let p3 = dir.path().join("oob.off");
        write(&p3, "OFF\n3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
        let msg = load_mesh(&p3, MeshFormat::Off).unwrap_err().to_string();
        assert!(msg.contains("vertex 7"), "{msg}");
    }

    #[test]
    fn side_labels_load_and_prune_with_mesh() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tri.off");
        write(&p, "OFF\n4 1 3\n0 0 0\n1 0 0\n0 1 0\n9 9 9\n3 0 1 2\n");
        let l = dir.path().join("labels.txt");
        write(&l, "1\n0\n1\n1\n");
        let m = load_mesh_with_labels(&p, MeshFormat::Off, &l).unwrap();
        assert_eq!(m.side_labels(), Some(&[1, 0, 1][..]));

        let short = dir.path().join("short.txt");
        write(&short, "1\n0\n");
        let msg = load_mesh_with_labels(&p, MeshFormat::Off, &short)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("2 labels for 4"), "{msg}");

        let bad = dir.path().join("badlabel.txt");
        write(&bad, "1\n0\n2\n0\n");
        let msg = load_mesh_with_labels(&p, MeshFormat::Off, &bad)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("0 or 1"), "{msg}");
    }

    #[test]
    fn format_inferred_from_extension() {
        assert_eq!(MeshFormat::from_path(Path::new("a/b.off")).unwrap(), MeshFormat::Off);
        assert_eq!(MeshFormat::from_path(Path::new("a/B.PLY")).unwrap(), MeshFormat::PlyAscii);
        assert!(MeshFormat::from_path(Path::new("a/b.obj")).is_err());
    }

    #[test]
    fn off_round_trip_is_exact() {
        let mesh = crate::synth::bumpy_grid(4, 5, 0.3, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("grid.off");
        write_off(&mesh, &p).unwrap();
        let back = load_mesh(&p, MeshFormat::Off).unwrap();
        assert_eq!(back.faces(), mesh.faces());
        // Display-format floats round-trip f64 exactly.
        assert_eq!(back.vertices(), mesh.vertices());
    }
}
