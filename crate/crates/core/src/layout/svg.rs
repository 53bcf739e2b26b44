use std::fmt::Write;

use num_complex::Complex64;

use super::DevelopedPattern;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Width and height of the image in pixels.
    pub size: f64,
    pub draw_triangles: bool,
    pub draw_circles: bool,
    /// Also draw the faces placed across the domain boundary.
    pub draw_ring: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { size: 800.0, draw_triangles: true, draw_circles: true, draw_ring: false }
    }
}

struct Canvas {
    half: f64,
    scale: f64,
}

impl Canvas {
    fn x(&self, z: Complex64) -> f64 {
        self.half + self.scale * z.re
    }

    fn y(&self, z: Complex64) -> f64 {
        self.half - self.scale * z.im
    }

    /// Path segment along the geodesic from `a` to `b`, starting at `a`.
    fn geodesic(&self, a: Complex64, b: Complex64) -> String {
        let det = a.re * b.im - a.im * b.re;
        let (ea, eb) = (0.5 * (a.norm_sqr() + 1.0), 0.5 * (b.norm_sqr() + 1.0));
        let scale = a.norm().max(b.norm()).max(1e-300);
        if det.abs() <= 1e-12 * scale * (a - b).norm() {
            return format!("L {:.6} {:.6}", self.x(b), self.y(b));
        }
        // Center c of the circle through a and b orthogonal to the unit circle: Re(c conj z) = (|z|^2 + 1) / 2.
        let cx = (ea * b.im - eb * a.im) / det;
        let cy = (a.re * eb - b.re * ea) / det;
        let c = Complex64::new(cx, cy);
        let rho = (c - a).norm() * self.scale;
        let sweep = if det > 0.0 { 1 } else { 0 };
        format!("A {rho:.6} {rho:.6} 0 0 {sweep} {:.6} {:.6}", self.x(b), self.y(b))
    }

    fn triangle(&self, p: &[Complex64; 3], class: &str, out: &mut String) {
        let mut d = format!("M {:.6} {:.6}", self.x(p[0]), self.y(p[0]));
        for i in 0..3 {
            d.push(' ');
            d.push_str(&self.geodesic(p[i], p[(i + 1) % 3]));
        }
        let _ = writeln!(out, r#"<path class="{class}" d="{d} Z"/>"#);
    }
}

/// SVG 1.1 drawing of the developed pattern in the Poincaré disk.
pub fn to_svg(pattern: &DevelopedPattern, opts: &SvgOptions) -> String {
    let half = 0.5 * opts.size;
    let canvas = Canvas { half, scale: 0.96 * half };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0:.0}" height="{0:.0}" viewBox="0 0 {0:.0} {0:.0}">"#,
        opts.size
    );
    let _ = writeln!(
        out,
        "<style>.disk{{fill:none;stroke:#000;stroke-width:1}} .face{{fill:none;stroke:#555;stroke-width:0.5}} \
         .ring-face{{fill:none;stroke:#bbb;stroke-width:0.4}} .vertex-circle{{fill:#3070c0;fill-opacity:0.12;stroke:#3070c0;stroke-width:0.6}}</style>"
    );
    let _ = writeln!(out, r#"<circle class="disk" cx="{half:.6}" cy="{half:.6}" r="{:.6}"/>"#, canvas.scale);
    if opts.draw_ring {
        for rf in &pattern.ring {
            canvas.triangle(&rf.corners, "ring-face", &mut out);
        }
    }
    if opts.draw_triangles {
        for f in &pattern.faces {
            canvas.triangle(&f.corners, "face", &mut out);
        }
    }
    if opts.draw_circles {
        for (id, c) in pattern.copies.iter().enumerate() {
            let (center, r) = c.circle.euclidean();
            let _ = writeln!(
                out,
                r#"<circle class="vertex-circle" data-vertex="{}" data-copy="{id}" cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#,
                c.vertex,
                canvas.x(center),
                canvas.y(center),
                r * canvas.scale
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
