//! Texture baking: scan-line rasterization of triangles in the new UV domain
//! and color transfer from the source atlases.

mod bake;
mod image;
mod sample;
mod scanline;

pub use bake::{bake_texture, dilate, BakeOptions, BakeOutput, FALLBACK_GRAY, MAX_DILATION_ROUNDS};
pub use image::{Rgba, TextureImage};
pub use sample::{sample, sample_source, Filter};
pub use scanline::{fill_polygon, odd_even_inside, scanline_fill, scanline_fill_rect, RasterPoint};
