use proptest::prelude::*;

use texpack_core::mesh::obj::{parse_obj, write_obj, ObjPart, UvSource};
use texpack_core::param::{count_flips, parameterize, ParamOptions, WeightScheme};
use texpack_core::raster::{bake_texture, scanline_fill, BakeOptions, Filter, RasterPoint, TextureImage};
use texpack_core::synth;

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn tri() -> impl Strategy<Value = [[f64; 2]; 3]> {
    [[unit(), unit()], [unit(), unit()], [unit(), unit()]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_tiling_claims_each_pixel_once(seed in 0u64..1000, n in 50usize..600, res in 8u32..80) {
        let m = synth::random_disk(seed, n);
        let mut claims = vec![0u32; (res * res) as usize];
        for f in m.faces() {
            let pts = f.map(|v| {
                let p = m.position(v);
                RasterPoint::new([p[0], p[1]], [p[0], p[1]], 0)
            });
            for q in scanline_fill(&pts, res) {
                let col = (q.u_new * res as f64) as u32;
                let row = (q.v_new * res as f64) as u32;
                claims[(row * res + col) as usize] += 1;
            }
        }
        prop_assert!(claims.iter().all(|&c| c == 1));
    }

    #[test]
    fn samples_interpolate_original_uvs(new in tri(), ori in tri(), res in 4u32..96) {
        let pts: [RasterPoint; 3] = std::array::from_fn(|k| RasterPoint::new(new[k], ori[k], 0));
        let [a, b, c] = new;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        prop_assume!(det.abs() > 1e-3);
        for q in scanline_fill(&pts, res) {
            let p = q.new_uv();
            let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (p[1] - a[1]) * (c[0] - a[0])) / det;
            let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / det;
            let l0 = 1.0 - l1 - l2;
            for d in 0..2 {
                let want = l0 * ori[0][d] + l1 * ori[1][d] + l2 * ori[2][d];
                prop_assert!((want - q.ori_uv()[d]).abs() < 1e-9, "{want} vs {:?}", q.ori_uv());
            }
        }
    }

    #[test]
    fn unfolded_maps_fill_the_texture(seed in 0u64..1000, n in 100usize..1500) {
        let m = synth::random_disk(seed, n);
        let opts = ParamOptions { scheme: WeightScheme::Uniform, ..Default::default() };
        let p = parameterize(&m, &opts).unwrap();
        prop_assert_eq!(count_flips(&m, &p.uv), 0);
        let atlas = synth::gradient(64);
        let out = bake_texture(&m, &p.uv, &[atlas], &BakeOptions::square(128)).unwrap();
        prop_assert!(out.defined_before_dilation >= 0.999);
        prop_assert_eq!(out.image.defined_fraction(), 1.0);
    }

    #[test]
    fn obj_round_trip_keeps_geometry(seed in 0u64..1000, n in 10usize..400) {
        let m = synth::random_disk(seed, n);
        let uv: Vec<[f64; 2]> = m.positions().iter().map(|p| [p[0], p[1]]).collect();
        let mut buf = Vec::new();
        let part = ObjPart { mesh: &m, uvs: UvSource::PerVertex(&uv), material: None };
        write_obj(&mut buf, None, &[part]).unwrap();
        let back = parse_obj(std::str::from_utf8(&buf).unwrap(), "mem.obj", std::path::Path::new(".")).unwrap();
        prop_assert_eq!(back.positions(), m.positions());
        prop_assert_eq!(back.faces().collect::<Vec<_>>(), m.faces().collect::<Vec<_>>());
        for (c, d) in back.corners().iter().zip(m.corners()) {
            prop_assert_eq!(c.uv, Some(uv[d.vertex]));
        }
    }
}

#[test]
fn bands_give_the_same_pixels_for_any_thread_count() {
    let m = synth::random_disk(3, 2000);
    let p = parameterize(&m, &ParamOptions::default()).unwrap();
    let atlas = synth::checkerboard(128, 8, [200, 10, 10, 255], [10, 10, 200, 255]);
    let opts = BakeOptions {
        filter: Filter::Bilinear,
        ..BakeOptions::square(300)
    };
    let bake = |threads: usize| -> TextureImage {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| bake_texture(&m, &p.uv, std::slice::from_ref(&atlas), &opts).unwrap().image)
    };
    let one = bake(1);
    for t in [2, 3, 8] {
        assert_eq!(bake(t).pixels(), one.pixels(), "{t} threads");
    }
}
