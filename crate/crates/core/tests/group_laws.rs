mod common;

use common::{element, kinds, rng};
use folner_lab::{parse_group_dsl, GroupDescriptor, GroupElement, ZdEmbedding};

#[test]
fn associativity_for_random_triples() {
    for (i, desc) in kinds().iter().enumerate() {
        let mut r = rng(100 + i as u64);
        for _ in 0..1000 {
            let (g, h, k) = (element(&mut r, desc), element(&mut r, desc), element(&mut r, desc));
            let left = desc.multiply(&desc.multiply(&g, &h).unwrap(), &k).unwrap();
            let right = desc.multiply(&g, &desc.multiply(&h, &k).unwrap()).unwrap();
            assert_eq!(left, right, "{desc}: ({g})({h})({k})");
        }
    }
}

#[test]
fn inverse_law_and_canonical_outputs() {
    for (i, desc) in kinds().iter().enumerate() {
        let mut r = rng(200 + i as u64);
        let e = desc.identity();
        for _ in 0..1000 {
            let g = element(&mut r, desc);
            let inv = desc.inverse(&g).unwrap();
            assert_eq!(desc.multiply(&g, &inv).unwrap(), e);
            assert_eq!(desc.multiply(&inv, &g).unwrap(), e);
            assert_eq!(desc.canonicalize(inv.clone()).unwrap(), inv);
            let h = element(&mut r, desc);
            let gh = desc.multiply(&g, &h).unwrap();
            assert_eq!(desc.canonicalize(gh.clone()).unwrap(), gh);
        }
    }
}

#[test]
fn embedding_images_commute() {
    for desc in kinds() {
        let d = match desc.declared_rank() {
            folner_lab::Rank::Finite(r) => r.min(3),
            folner_lab::Rank::Infinite => 4,
        };
        if d == 0 {
            assert!(ZdEmbedding::standard(&desc, 0).is_err());
            continue;
        }
        let e = ZdEmbedding::standard(&desc, d).unwrap();
        for x in e.images() {
            for y in e.images() {
                assert_eq!(desc.multiply(x, y).unwrap(), desc.multiply(y, x).unwrap());
            }
        }
    }
}

#[test]
fn embedding_coordinates_round_trip() {
    let mut r = rng(7);
    for desc in [parse_group_dsl("Z/6xZ^2").unwrap(), GroupDescriptor::WreathZZ, GroupDescriptor::Lamplighter] {
        let d = if desc == GroupDescriptor::WreathZZ { 3 } else { desc.free_rank().unwrap_or(1).max(1) };
        let e = ZdEmbedding::standard(&desc, d).unwrap();
        for _ in 0..200 {
            let coords: Vec<i64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, -9..=9)).collect();
            let g = e.element_at(&coords).unwrap();
            assert_eq!(e.coordinates(&g).unwrap(), coords);
        }
    }
    let lamp = ZdEmbedding::standard(&GroupDescriptor::Lamplighter, 1).unwrap();
    assert!(!lamp.contains(&GroupElement::Lamp { shift: 0, lamps: vec![0] }));
}

#[test]
fn dsl_round_trip_on_a_generated_corpus() {
    let mut corpus = vec!["lamplighter".to_string(), "LampLighter".into(), "wreath-zz".into(), "WREATH-ZZ".into()];
    for d in 1..5 {
        corpus.push(format!("Z^{d}"));
        corpus.push(format!("z^{d}"));
        for m in [2, 3, 12] {
            corpus.push(format!("Z/{m}xZ^{d}"));
            corpus.push(format!("z/{m}XZ/{}xZ^{d}", m + 1));
            corpus.push(format!("Z/{m}xZ/{d}").replace("Z/1", "Z/7"));
        }
    }
    for s in corpus {
        let g = parse_group_dsl(&s).unwrap();
        let rendered = g.to_string();
        assert_eq!(rendered, s.to_ascii_lowercase().replace('z', "Z").replace("wreath-ZZ", "wreath-zz").replace('X', "x"));
        assert_eq!(parse_group_dsl(&rendered).unwrap(), g);
    }
    for bad in ["Z^0", "Z/1xZ^2", "Z^2xZ/3", "ZxZ", "", "lamp", "Z/6xx Z^2"] {
        assert!(parse_group_dsl(bad).is_err(), "{bad:?}");
    }
}
