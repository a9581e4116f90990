use firescope_core::io::{decode_raster, encode_raster, MAGIC};
use firescope_core::Raster;
use proptest::prelude::*;

fn valid_bytes(w: usize, h: usize, values: &[f32]) -> Vec<u8> {
    let r = Raster::new(w, h, values.iter().map(|&v| f64::from(v)).collect()).unwrap();
    encode_raster(&r).unwrap()
}

proptest! {
    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = decode_raster(&bytes);
        let mut prefixed = MAGIC.to_vec();
        prefixed.extend_from_slice(&bytes);
        prop_assert!(decode_raster(&prefixed).is_err() || bytes.contains(&b'\n'));
    }

    #[test]
    fn corrupted_containers_are_structured_errors(
        w in 1usize..6,
        h in 1usize..6,
        seed in prop::collection::vec(-100.0f32..100.0, 36),
        cut in any::<prop::sample::Index>(),
        flip in any::<prop::sample::Index>(),
        byte in any::<u8>(),
    ) {
        let good = valid_bytes(w, h, &seed[..w * h]);
        let decoded = decode_raster(&good).unwrap();
        prop_assert_eq!(encode_raster(&decoded).unwrap(), good.clone());

        // Truncate anywhere: always an error.
        let at = cut.index(good.len());
        prop_assert!(decode_raster(&good[..at]).is_err());

        // Overwrite one byte: either still valid or a located error.
        let mut bad = good.clone();
        let i = flip.index(bad.len());
        bad[i] = byte;
        match decode_raster(&bad) {
            Ok(r) => prop_assert_eq!(r.len(), w * h),
            Err(e) => prop_assert!(!e.field.is_empty()),
        }
    }
}
