//! RGB rasters, their non-overlapping window partition, and binary netpbm I/O.

mod pnm;

pub use pnm::{decode_pgm, decode_ppm, encode_gray, encode_pgm, encode_ppm, CodecError, GrayImage};

use crate::{Error, Result};

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width.checked_mul(height).ok_or_else(|| {
            Error::InvalidImage(format!("{width}x{height} overflows the pixel count"))
        })?;
        if pixels.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} needs {expected} pixels, got {}",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Builds an image by evaluating `f(x, y)` in row-major order.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn region(&self, window: Window) -> Result<Region<'_>> {
        Region::new(self, window)
    }

    pub fn full_region(&self) -> Region<'_> {
        Region {
            image: self,
            window: Window { x0: 0, y0: 0, w: self.width, h: self.height },
        }
    }
}

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Window {
    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x0 + self.w && y >= self.y0 && y < self.y0 + self.h
    }
}

/// A window bound to the image it was cut from.
#[derive(Debug, Clone, Copy)]
pub struct Region<'a> {
    image: &'a Image,
    window: Window,
}

impl<'a> Region<'a> {
    pub fn new(image: &'a Image, window: Window) -> Result<Self> {
        if window.w == 0 || window.h == 0 {
            return Err(Error::ZeroWindow(window.w, window.h));
        }
        if window.x0 + window.w > image.width || window.y0 + window.h > image.height {
            return Err(Error::InvalidImage(format!(
                "region {}x{} at ({}, {}) exceeds {}x{} image",
                window.w, window.h, window.x0, window.y0, image.width, image.height
            )));
        }
        Ok(Self { image, window })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn image(&self) -> &'a Image {
        self.image
    }

    pub fn pixel_count(&self) -> usize {
        self.window.area()
    }

    /// Pixels in row-major order within the region.
    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + 'a {
        let Window { x0, y0, w, h } = self.window;
        let image = self.image;
        (y0..y0 + h).flat_map(move |y| {
            let start = y * image.width + x0;
            image.pixels[start..start + w].iter().copied()
        })
    }
}

/// Row-major partition of a `image_w x image_h` canvas into windows.
///
/// Interior windows are exactly `window_w x window_h`; the last column and
/// row keep whatever remainder is left, so every pixel belongs to exactly
/// one window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowGrid {
    window_w: usize,
    window_h: usize,
    image_w: usize,
    image_h: usize,
    columns: usize,
    rows: usize,
}

impl WindowGrid {
    pub fn new(image_w: usize, image_h: usize, window_w: usize, window_h: usize) -> Result<Self> {
        if window_w == 0 || window_h == 0 {
            return Err(Error::ZeroWindow(window_w, window_h));
        }
        if window_w > image_w || window_h > image_h {
            return Err(Error::WindowTooLarge { window_w, window_h, image_w, image_h });
        }
        Ok(Self {
            window_w,
            window_h,
            image_w,
            image_h,
            columns: image_w.div_ceil(window_w),
            rows: image_h.div_ceil(window_h),
        })
    }

    pub fn window_w(&self) -> usize {
        self.window_w
    }

    pub fn window_h(&self) -> usize {
        self.window_h
    }

    pub fn image_w(&self) -> usize {
        self.image_w
    }

    pub fn image_h(&self) -> usize {
        self.image_h
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.columns * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Window at a row-major index. Panics when out of range.
    pub fn window(&self, index: usize) -> Window {
        assert!(index < self.len(), "window index {index} out of range");
        let (col, row) = (index % self.columns, index / self.columns);
        let x0 = col * self.window_w;
        let y0 = row * self.window_h;
        Window {
            x0,
            y0,
            w: self.window_w.min(self.image_w - x0),
            h: self.window_h.min(self.image_h - y0),
        }
    }

    pub fn windows(&self) -> impl Iterator<Item = Window> + '_ {
        (0..self.len()).map(|i| self.window(i))
    }

    /// Row-major index of the window owning pixel `(x, y)`.
    pub fn index_of(&self, x: usize, y: usize) -> usize {
        (y / self.window_h) * self.columns + x / self.window_w
    }

    pub fn regions<'a>(&'a self, image: &'a Image) -> impl Iterator<Item = Region<'a>> + 'a {
        debug_assert_eq!((image.width, image.height), (self.image_w, self.image_h));
        self.windows().map(move |window| Region { image, window })
    }
}

/// Partitions `image` into non-overlapping `window_w x window_h` windows.
pub fn tile(image: &Image, window_w: usize, window_h: usize) -> Result<WindowGrid> {
    WindowGrid::new(image.width, image.height, window_w, window_h)
}
