//! Seeded synthetic scenes with exact ground truth.
//!
//! A scene is a canvas plus rectangular patches. Each patch has a base color,
//! a jitter amplitude `j` and a skin flag. Pixels not covered by any patch are
//! black and non-skin.
//!
//! # Generator
//!
//! Noise comes from SplitMix64 seeded with `seed`:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15            (wrapping)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB      (wrapping)
//! return z ^ (z >> 31)
//! ```
//!
//! Pixels are visited in canvas row-major order. Every covered pixel draws
//! three values (red, green, blue), even when `j = 0`, and channel `c`
//! becomes `clamp(base_c + (draw % (2j + 1)) - j, 0, 255)`.
//!
//! # Text format
//!
//! ```text
//! # comments and blank lines are ignored
//! canvas 64 32
//! seed 7
//! # x0 y0 w h r g b jitter skin
//! 0 0 32 32 210 150 120 10 1
//! 32 0 32 32 0 0 255 10 0
//! ```
//!
//! `canvas` and `seed` must appear once each, before any patch line.

use std::fmt;

use crate::evaluation::GroundTruth;
use crate::imaging::{Image, Window};
use crate::{Error, Result};

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
    pub color: [u8; 3],
    pub jitter: u8,
    pub skin: bool,
}

impl Patch {
    fn window(&self) -> Window {
        Window { x0: self.x0, y0: self.y0, w: self.w, h: self.h }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub patches: Vec<Patch>,
}

impl SynthSpec {
    /// A canvas filled by one patch.
    pub fn solid(width: usize, height: usize, color: [u8; 3], jitter: u8, skin: bool, seed: u64) -> Self {
        Self {
            width,
            height,
            seed,
            patches: vec![Patch { x0: 0, y0: 0, w: width, h: height, color, jitter, skin }],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::SynthSpec { line, message };
        let mut canvas = None;
        let mut seed = None;
        let mut patches = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "canvas" => {
                    if canvas.is_some() {
                        return Err(err(line_no, "duplicate canvas line".into()));
                    }
                    if tokens.len() != 3 {
                        return Err(err(line_no, "expected `canvas WIDTH HEIGHT`".into()));
                    }
                    let w: usize = parse_num(tokens[1], "width", line_no)?;
                    let h: usize = parse_num(tokens[2], "height", line_no)?;
                    if w == 0 || h == 0 {
                        return Err(err(line_no, "canvas dimensions must be positive".into()));
                    }
                    canvas = Some((w, h));
                }
                "seed" => {
                    if seed.is_some() {
                        return Err(err(line_no, "duplicate seed line".into()));
                    }
                    if tokens.len() != 2 {
                        return Err(err(line_no, "expected `seed N`".into()));
                    }
                    seed = Some(parse_num(tokens[1], "seed", line_no)?);
                }
                _ => {
                    if canvas.is_none() || seed.is_none() {
                        return Err(err(line_no, "patch before `canvas` and `seed` lines".into()));
                    }
                    if tokens.len() != 9 {
                        return Err(err(
                            line_no,
                            format!("expected 9 fields `x0 y0 w h r g b jitter skin`, got {}", tokens.len()),
                        ));
                    }
                    let skin = match tokens[8] {
                        "0" => false,
                        "1" => true,
                        other => return Err(err(line_no, format!("skin flag must be 0 or 1, got `{other}`"))),
                    };
                    patches.push(Patch {
                        x0: parse_num(tokens[0], "x0", line_no)?,
                        y0: parse_num(tokens[1], "y0", line_no)?,
                        w: parse_num(tokens[2], "w", line_no)?,
                        h: parse_num(tokens[3], "h", line_no)?,
                        color: [
                            parse_num(tokens[4], "r", line_no)?,
                            parse_num(tokens[5], "g", line_no)?,
                            parse_num(tokens[6], "b", line_no)?,
                        ],
                        jitter: parse_num(tokens[7], "jitter", line_no)?,
                        skin,
                    });
                }
            }
        }
        let last = text.lines().count().max(1);
        let (width, height) = canvas.ok_or_else(|| err(last, "missing `canvas` line".into()))?;
        let seed = seed.ok_or_else(|| err(last, "missing `seed` line".into()))?;
        Ok(Self { width, height, seed, patches })
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidImage(format!(
                "canvas must be positive, got {}x{}",
                self.width, self.height
            )));
        }
        for (i, p) in self.patches.iter().enumerate() {
            if p.w == 0 || p.h == 0 || p.x0 + p.w > self.width || p.y0 + p.h > self.height {
                return Err(Error::InvalidImage(format!(
                    "patch {i} ({}x{} at {},{}) does not fit the {}x{} canvas",
                    p.w, p.h, p.x0, p.y0, self.width, self.height
                )));
            }
        }
        for (i, a) in self.patches.iter().enumerate() {
            for (j, b) in self.patches.iter().enumerate().skip(i + 1) {
                let overlap_x = a.x0 < b.x0 + b.w && b.x0 < a.x0 + a.w;
                let overlap_y = a.y0 < b.y0 + b.h && b.y0 < a.y0 + a.h;
                if overlap_x && overlap_y {
                    return Err(Error::OverlappingPatches(i, j));
                }
            }
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(token: &str, what: &str, line: usize) -> Result<T> {
    token.parse().map_err(|_| Error::SynthSpec {
        line,
        message: format!("invalid {what} `{token}`"),
    })
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "canvas {} {}", self.width, self.height)?;
        writeln!(f, "seed {}", self.seed)?;
        for p in &self.patches {
            let [r, g, b] = p.color;
            writeln!(f, "{} {} {} {} {r} {g} {b} {} {}", p.x0, p.y0, p.w, p.h, p.jitter, u8::from(p.skin))?;
        }
        Ok(())
    }
}

pub fn generate(spec: &SynthSpec) -> Result<(Image, GroundTruth)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut owner: Vec<Option<usize>> = vec![None; w * h];
    for (i, p) in spec.patches.iter().enumerate() {
        let win = p.window();
        for y in win.y0..win.y0 + win.h {
            owner[y * w + win.x0..y * w + win.x0 + win.w].fill(Some(i));
        }
    }
    let mut rng = SplitMix64::new(spec.seed);
    let mut pixels = Vec::with_capacity(w * h);
    let mut skin = Vec::with_capacity(w * h);
    for slot in &owner {
        match slot {
            Some(i) => {
                let p = &spec.patches[*i];
                let span = 2 * u64::from(p.jitter) + 1;
                let px = p.color.map(|base| {
                    let offset = (rng.next_u64() % span) as i32 - i32::from(p.jitter);
                    (i32::from(base) + offset).clamp(0, 255) as u8
                });
                pixels.push(px);
                skin.push(p.skin);
            }
            None => {
                pixels.push([0, 0, 0]);
                skin.push(false);
            }
        }
    }
    Ok((Image::new(w, h, pixels)?, GroundTruth::new(w, h, skin)?))
}

/// Noise-free single-color image.
pub fn uniform(width: usize, height: usize, color: [u8; 3]) -> Image {
    Image::new(width, height, vec![color; width * height]).expect("uniform image needs positive dimensions")
}
