use std::fmt::Write as _;

use super::mask::RegionMask;
use crate::error::{Error, Result};
use crate::fmt::g12;

/// Fill colors for components 0..8; later components reuse them cyclically.
pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Rows `k_1..k_t, p_1..p_t, member, component, regret`, one per grid point
/// in lattice order.
pub fn mask_to_csv(mask: &RegionMask) -> String {
    let grid = mask.grid();
    let t = grid.dim();
    let mut out = String::new();
    let header: Vec<String> = (1..=t)
        .map(|j| format!("k_{j}"))
        .chain((1..=t).map(|j| format!("p_{j}")))
        .chain(["member".into(), "component".into(), "regret".into()])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (idx, k) in grid.lattice().chunks(t).enumerate() {
        let mut fields: Vec<String> = k.iter().map(|v| v.to_string()).collect();
        fields.extend(grid.point(k).into_iter().map(g12));
        fields.push(u8::from(mask.is_member(idx)).to_string());
        fields.push(mask.labels()[idx].to_string());
        fields.push(g12(mask.regrets()[idx]));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders a mask over a 2-simplex as an SVG 1.1 document.
///
/// The simplex is an equilateral triangle with vertex 1 at the top and the
/// others following counterclockwise. Member points are drawn as discs
/// colored by component id; `vertex_labels` name the three corners.
pub fn mask_to_svg(mask: &RegionMask, vertex_labels: [&str; 3], title: &str) -> Result<String> {
    let grid = mask.grid();
    if grid.dim() != 3 {
        return Err(Error::InvalidParameter(format!(
            "SVG rendering needs a 2-simplex, got dimension {}",
            grid.dim()
        )));
    }
    const WIDTH: f64 = 600.0;
    const MARGIN: f64 = 50.0;
    let side = WIDTH - 2.0 * MARGIN;
    let height_tri = side * 3f64.sqrt() / 2.0;
    let height = height_tri + 2.0 * MARGIN + 30.0;
    let top = (WIDTH / 2.0, MARGIN + 20.0);
    let left = (MARGIN, MARGIN + 20.0 + height_tri);
    let right = (WIDTH - MARGIN, MARGIN + 20.0 + height_tri);
    let corners = [top, left, right];
    let radius = 0.58 * side / grid.resolution() as f64;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(s, "<!-- cpt-eq {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{:.0}\" viewBox=\"0 0 {WIDTH} {:.0}\">",
        height, height
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{} ({} components)</text>",
        WIDTH / 2.0,
        xml_escape(title),
        mask.component_count()
    );
    s.push_str("<g stroke=\"none\">\n");
    let t = grid.dim();
    for (idx, k) in grid.lattice().chunks(t).enumerate() {
        let label = mask.labels()[idx];
        if label < 0 {
            continue;
        }
        let p = grid.point(k);
        let x = p[0] * top.0 + p[1] * left.0 + p[2] * right.0;
        let y = p[0] * top.1 + p[1] * left.1 + p[2] * right.1;
        let color = PALETTE[label as usize % PALETTE.len()];
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{radius:.3}\" fill=\"{color}\"/>"
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        "<polygon points=\"{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        top.0, top.1, left.0, left.1, right.0, right.1
    );
    let offsets = [(0.0, -8.0, "middle"), (-6.0, 18.0, "end"), (6.0, 18.0, "start")];
    for ((c, label), (dx, dy, anchor)) in corners.iter().zip(vertex_labels).zip(offsets) {
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
            c.0 + dx,
            c.1 + dy,
            xml_escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
