use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::matrix::CoQualGraph;
use crate::corpus::discipline;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Graphml,
    Dot,
    EdgeCsv,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphml" => Ok(GraphFormat::Graphml),
            "dot" => Ok(GraphFormat::Dot),
            "edge_csv" | "csv" => Ok(GraphFormat::EdgeCsv),
            other => Err(Error::InvalidArgument(format!("unknown graph format `{other}`"))),
        }
    }
}

impl GraphFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            GraphFormat::Graphml => "graphml",
            GraphFormat::Dot => "dot",
            GraphFormat::EdgeCsv => "csv",
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Node size hint proportional to degree.
fn size_hint(degree: usize, max_degree: usize) -> f64 {
    if max_degree == 0 {
        1.0
    } else {
        1.0 + 9.0 * degree as f64 / max_degree as f64
    }
}

fn render(g: &CoQualGraph, format: GraphFormat, header: Option<&str>) -> String {
    let max_degree = g.nodes.iter().map(|n| n.degree).max().unwrap_or(0);
    let mut s = String::new();
    match format {
        GraphFormat::Graphml => {
            s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            if let Some(h) = header {
                let _ = writeln!(s, "<!-- {} -->", xml_escape(h).replace("--", "- -"));
            }
            s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
            s.push_str("  <key id=\"code\" for=\"node\" attr.name=\"code\" attr.type=\"string\"/>\n");
            s.push_str("  <key id=\"area_id\" for=\"node\" attr.name=\"area_id\" attr.type=\"int\"/>\n");
            s.push_str("  <key id=\"area\" for=\"node\" attr.name=\"area\" attr.type=\"string\"/>\n");
            s.push_str("  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n");
            s.push_str("  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"double\"/>\n");
            s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
            s.push_str("  <graph id=\"coqualification\" edgedefault=\"undirected\">\n");
            for (i, n) in g.nodes.iter().enumerate() {
                let area = discipline::area(n.area_id).map(|a| a.code.as_str()).unwrap_or("");
                let _ = writeln!(
                    s,
                    "    <node id=\"n{i}\"><data key=\"code\">{}</data><data key=\"area_id\">{}</data><data key=\"area\">{}</data><data key=\"degree\">{}</data><data key=\"size\">{:.4}</data></node>",
                    n.code,
                    n.area_id,
                    area,
                    n.degree,
                    size_hint(n.degree, max_degree)
                );
            }
            for (k, e) in g.edges.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "    <edge id=\"e{k}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{:.6}</data></edge>",
                    e.i, e.j, e.weight
                );
            }
            s.push_str("  </graph>\n</graphml>\n");
        }
        GraphFormat::Dot => {
            if let Some(h) = header {
                let _ = writeln!(s, "// {h}");
            }
            s.push_str("graph coqualification {\n");
            for n in &g.nodes {
                let _ = writeln!(
                    s,
                    "  \"{}\" [area_id={}, degree={}, width={:.4}, colorscheme=set312, color={}];",
                    n.code,
                    n.area_id,
                    n.degree,
                    size_hint(n.degree, max_degree) / 10.0,
                    (n.area_id - 1) % 12 + 1
                );
            }
            for e in &g.edges {
                let _ = writeln!(
                    s,
                    "  \"{}\" -- \"{}\" [weight={:.6}, penwidth={:.4}];",
                    g.nodes[e.i].code,
                    g.nodes[e.j].code,
                    e.weight,
                    1.0 + 9.0 * e.weight
                );
            }
            s.push_str("}\n");
        }
        GraphFormat::EdgeCsv => {
            if let Some(h) = header {
                let _ = writeln!(s, "# {h}");
            }
            s.push_str("i,j,weight\n");
            for e in &g.edges {
                let _ = writeln!(s, "{},{},{:.6}", g.nodes[e.i].code, g.nodes[e.j].code, e.weight);
            }
        }
    }
    s
}

/// Writes the graph; `header` becomes a format-appropriate comment.
pub fn write_graph(g: &CoQualGraph, format: GraphFormat, header: Option<&str>, mut w: impl Write) -> Result<()> {
    w.write_all(render(g, format, header).as_bytes())
        .map_err(|e| Error::io("<writer>", e))
}

pub fn export_graph(g: &CoQualGraph, format: GraphFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render(g, format, None)).map_err(|e| Error::io(path, e))
}
