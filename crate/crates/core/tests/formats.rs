use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polarcodes::channel::{make_bsc, ChannelParam, DiscreteSymmetricChannel};
use polarcodes::concat::{concat_decode, concat_encode, ConcatSpec};
use polarcodes::construct::{construct, de_bit_errors, BitErrorProfile, BoxMode};
use polarcodes::density::LlrGrid;
use polarcodes::kernels::{Kernel, KernelCode};
use polarcodes::llr::TieBreak;
use polarcodes::polar::{encode, sc_decode, PolarCodeSpec};
use polarcodes::shortcodes::CodeTable;
use polarcodes::Bit;

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<Bit> {
    (0..n).map(|_| rng.random_range(0..2)).collect()
}

#[test]
fn text_formats_round_trip() {
    let ch = make_bsc(0.11).unwrap();
    let back = DiscreteSymmetricChannel::from_text("bsc", ch.to_text().as_bytes()).unwrap();
    assert_eq!(
        back.initial_density(LlrGrid::default()),
        ch.initial_density(LlrGrid::default())
    );

    let spec = PolarCodeSpec::new(4, [0, 1, 2, 4, 8]).unwrap();
    assert_eq!(PolarCodeSpec::from_text(spec.to_text().as_bytes()).unwrap(), spec);

    let f = ch.initial_density(LlrGrid::with_bound(256, 20.0).unwrap());
    let profile = de_bit_errors(&f, 3, BoxMode::Fast).unwrap();
    assert_eq!(
        BitErrorProfile::from_text(profile.to_text().as_bytes()).unwrap(),
        profile
    );

    let table = CodeTable::shipped().unwrap();
    assert_eq!(
        CodeTable::from_text(table.to_text().as_bytes()).unwrap().to_text(),
        table.to_text()
    );

    let g3 = Kernel::g3();
    assert_eq!(Kernel::from_text(g3.to_text().as_bytes()).unwrap(), g3);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(PolarCodeSpec::from_text("3 2\n0\n".as_bytes()).is_err());
    assert!(PolarCodeSpec::from_text("2 2\n0\n9\n".as_bytes()).is_err());
    assert!(DiscreteSymmetricChannel::from_text("x", "1 0.9\n-1 0.2\n".as_bytes()).is_err());
    // Declared distance disagrees with the generator.
    let mut bad = String::from("1 31 1\n");
    bad.push_str(&"1".repeat(32));
    bad.push('\n');
    assert!(CodeTable::from_text(bad.as_bytes()).is_err());
    assert!("awgn".parse::<ChannelParam>().is_err());
    assert!("bsc:0.7".parse::<ChannelParam>().is_err());
}

#[test]
fn noiseless_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ch = ChannelParam::Awgn(2.0).build().unwrap();
    let code = construct(&ch, 6, 40, LlrGrid::with_bound(1024, 60.0).unwrap(), BoxMode::Fast).unwrap();
    let info = random_bits(&mut rng, 40);
    let word = encode(&info, &code.spec).unwrap();
    let llrs: Vec<f64> = word.iter().map(|&b| if b == 0 { 6.0 } else { -6.0 }).collect();
    let out = sc_decode(&llrs, &code.spec, TieBreak::Random, &mut rng).unwrap();
    assert_eq!(out.info, info);

    let g3 = KernelCode::new(Kernel::g3(), 3, &[0, 1, 2, 3, 4, 5, 6, 9, 10, 12, 18]).unwrap();
    let info = random_bits(&mut rng, g3.k());
    let word = g3.encode(&info).unwrap();
    assert_eq!(word.len(), 27);
    let llrs: Vec<f64> = word.iter().map(|&b| if b == 0 { 6.0 } else { -6.0 }).collect();
    assert_eq!(g3.decode(&llrs, TieBreak::Random, &mut rng).unwrap(), info);

    let table = Arc::new(CodeTable::shipped().unwrap());
    let assignment: Vec<usize> = (0..8).map(|i| [0, 3, 10, 24][i % 4]).collect();
    let spec = ConcatSpec::new(3, table, assignment).unwrap();
    let info = random_bits(&mut rng, spec.k());
    let word = concat_encode(&info, &spec).unwrap();
    let llrs: Vec<f64> = word.iter().map(|&b| if b == 0 { 6.0 } else { -6.0 }).collect();
    assert_eq!(concat_decode(&llrs, &spec).unwrap().info, info);
}
