//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails or overruns its time budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roimark::authmark::{is_prime, validate_key};
use roimark::codec::{rle_compress, rle_decompress, BitString};
use roimark::engine::{embed, extract_header, recover, restore, verify, PayloadState};
use roimark::image::{Rect, RegionMap};
use roimark::md5::md5;
use roimark::metrics::{mssim, psnr, psnr_bytes};
use roimark::synth::{self, Family};
use roimark::tamper::{apply_tamper, random_regions, TamperMode, TamperSpec};
use roimark::Error;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// ROIs used on 256x256 carriers, up to the largest that leaves enough RONI
/// blocks (224x176 = 60.2% of the image).
const ROIS: [Rect; 5] = [
    Rect::new(28, 28, 200, 192),
    Rect::new(62, 40, 132, 176),
    Rect::new(76, 64, 104, 128),
    Rect::new(3, 3, 224, 176),
    Rect::new(3, 3, 196, 196),
];

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitString {
    // mix of run-heavy and noisy strings
    let p_flip: f64 = rng.gen_range(0.02..0.6);
    let mut bit = rng.gen::<bool>();
    (0..len)
        .map(|_| {
            if rng.gen_bool(p_flip) {
                bit = !bit;
            }
            bit
        })
        .collect()
}

fn ac1_rle() -> Check {
    let input: BitString = "000001111110000000".parse().unwrap();
    let packed = rle_compress(&input);
    ensure!(
        packed.len() == 12,
        "worked example packed to {} bits",
        packed.len()
    );
    ensure!(packed.to_string() == "101011011110", "tokens {packed}");
    ensure!(
        rle_decompress(&packed, 18).map_err(|e| e.to_string())? == input,
        "example round trip"
    );

    let mut exhaustive = 0;
    for len in 0..=12usize {
        for v in 0u32..(1 << len) {
            let d: BitString = (0..len).map(|i| (v >> i) & 1 == 1).collect();
            let back = rle_decompress(&rle_compress(&d), len).map_err(|e| e.to_string())?;
            ensure!(back == d, "exhaustive mismatch for {d}");
            exhaustive += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=4096);
        let d = random_bits(&mut rng, len);
        let back = rle_decompress(&rle_compress(&d), len).map_err(|e| e.to_string())?;
        ensure!(back == d, "random round trip failed at len {len}");
    }
    Ok(format!(
        "12-bit example; {exhaustive} exhaustive + 10000 random round trips"
    ))
}

fn ac2_block_counts() -> Check {
    let cases = [
        (Rect::new(28, 28, 200, 192), 2400),
        (Rect::new(62, 40, 132, 176), 1452),
        (Rect::new(76, 64, 104, 128), 832),
    ];
    for (roi, want) in cases {
        let map = RegionMap::new(256, 256, roi).map_err(|e| e.to_string())?;
        ensure!(
            map.roi_blocks().len() == want,
            "{roi}: {} blocks, want {want}",
            map.roi_blocks().len()
        );
    }
    Ok("2400 / 1452 / 832".into())
}

fn ac3_bijection() -> Check {
    let mut pairs = 0;
    for n in 1..=500usize {
        for k in 2..n as u64 {
            let Ok(key) = validate_key(k, n, n) else {
                continue;
            };
            let mut seen = vec![false; n + 1];
            for b in 1..=n {
                let t = key.map(b).map_err(|e| e.to_string())?;
                ensure!(
                    (1..=n).contains(&t) && !seen[t],
                    "N_b={n} k={k}: collision or range at {b}->{t}"
                );
                seen[t] = true;
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} (N_b, k) pairs are permutations"))
}

fn ac4_distortion() -> Check {
    let mut worst_psnr = f64::INFINITY;
    let mut worst_mssim = f64::INFINITY;
    let mut largest = 0.0f64;
    let corpus = synth::corpus(25, 256, 256, 400);
    for (i, (name, img)) in corpus.iter().enumerate() {
        let roi = ROIS[i % ROIS.len()];
        let frac = roi.area() as f64 / (256.0 * 256.0);
        ensure!(frac <= 0.62, "ROI {roi} covers {frac:.3} of the image");
        largest = largest.max(frac);
        // 0.5 KB records on the large ROIs, proportionally less on small ones
        let epr = synth::random_epr((roi.area() / 75).min(512), i as u64);
        let res = embed(img, roi, &epr, "distortion", 17).map_err(|e| format!("{name}: {e}"))?;
        let p = psnr(img, &res.watermarked).unwrap();
        let s = mssim(img, &res.watermarked).unwrap();
        ensure!(p >= 48.1, "{name}: PSNR {p:.3} < 48.1");
        ensure!(s >= 0.90, "{name}: MSSIM {s:.4} < 0.90");
        worst_psnr = worst_psnr.min(p);
        worst_mssim = worst_mssim.min(s);
    }
    Ok(format!(
        "{} images, ROI up to {:.1}%: min PSNR {worst_psnr:.2} dB, min MSSIM {worst_mssim:.4}",
        corpus.len(),
        largest * 100.0
    ))
}

fn random_prime_key(rng: &mut ChaCha8Rng, n: usize) -> Option<u64> {
    let candidates: Vec<u64> = (2..n as u64)
        .filter(|&k| is_prime(k) && !(n as u64).is_multiple_of(k))
        .collect();
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.gen_range(0..candidates.len())])
    }
}

fn ac5_reversibility() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    let mut attempts = 0;
    while done < 100 {
        attempts += 1;
        ensure!(attempts < 1000, "could not draw 100 embeddable tuples");
        let fam = Family::EMBEDDABLE[rng.gen_range(0..Family::EMBEDDABLE.len())];
        let img = synth::generate(fam, 256, 256, rng.gen());
        let w = 4 * rng.gen_range(4..=40);
        let h = 4 * rng.gen_range(4..=40);
        let roi = Rect::new(rng.gen_range(3..=253 - w), rng.gen_range(3..=253 - h), w, h);
        let epr_len = rng.gen_range(0..=(roi.area() / 64).min(512));
        let epr = synth::random_epr(epr_len, rng.gen());
        let k1: String = (0..rng.gen_range(1..24))
            .map(|_| rng.gen_range('!'..='~'))
            .collect();
        let Some(k) = random_prime_key(&mut rng, roi.area() / 16) else {
            continue;
        };

        let res = match embed(&img, roi, &epr, &k1, k) {
            Ok(r) => r,
            Err(Error::CapacityExceeded(_)) | Err(Error::InsufficientRoni { .. }) => continue,
            Err(e) => return Err(format!("embed {roi} k={k}: {e}")),
        };
        let rep = verify(&res.watermarked, &k1, k).map_err(|e| e.to_string())?;
        ensure!(rep.authentic, "trial {done}: not authentic");
        ensure!(
            rep.epr.as_deref() == Some(&epr[..]),
            "trial {done}: EPR mismatch"
        );
        let back = restore(&res.watermarked, &k1, k).map_err(|e| e.to_string())?;
        ensure!(
            back.crop(&roi).unwrap() == img.crop(&roi).unwrap(),
            "trial {done}: ROI not bit exact"
        );
        done += 1;
    }
    Ok(format!("100 tuples ({attempts} drawn)"))
}

fn ac6_fast_path() -> Check {
    for (i, (name, img)) in synth::corpus(5, 256, 256, 600).iter().enumerate() {
        let roi = ROIS[i % 3];
        let epr = synth::random_epr((roi.area() / 75).min(512), 6);
        let res = embed(img, roi, &epr, "fast", 17).map_err(|e| e.to_string())?;
        let rep = verify(&res.watermarked, "fast", 17).map_err(|e| e.to_string())?;
        ensure!(rep.authentic, "{name}: not authentic");
        ensure!(
            rep.block_comparisons == 0,
            "{name}: {} comparisons",
            rep.block_comparisons
        );

        // control: a tampered image scans every block
        let mut bad = res.watermarked.clone();
        bad.set(roi.x + 1, roi.y + 1, bad.get(roi.x + 1, roi.y + 1) ^ 0x80);
        let rep = verify(&bad, "fast", 17).map_err(|e| e.to_string())?;
        ensure!(
            rep.block_comparisons == roi.area() / 16,
            "{name}: control scanned {}",
            rep.block_comparisons
        );
    }
    Ok("0 comparisons on 5 authentic images; full scan on tampered controls".into())
}

fn ac7_localization_recovery() -> Check {
    let mut trials = 0;
    let mut corrupt = 0;
    let mut flagged_total = 0;
    for t in 0..60u64 {
        let fam = Family::EMBEDDABLE[t as usize % Family::EMBEDDABLE.len()];
        let img = synth::generate(fam, 256, 256, 7000 + t);
        let roi = ROIS[t as usize % 3];
        let epr = synth::random_epr((roi.area() / 75).min(512), t);
        let res = embed(&img, roi, &epr, "recovery", 17).map_err(|e| e.to_string())?;

        let count = if t % 2 == 0 { 1 } else { 3 };
        let size = 8 + (t as usize % 4) * 4;
        let regions = random_regions(roi, count, size, t);
        // MSB-level attack: fill with the intensity extreme opposite the region's content
        let (sum, n) = regions
            .iter()
            .flat_map(|r| img.crop(r).unwrap())
            .fold((0u64, 0u64), |(s, n), p| (s + p as u64, n + 1));
        let value = if sum < 128 * n { 255 } else { 0 };
        let spec = TamperSpec {
            regions,
            mode: TamperMode::Constant { value },
        };
        ensure!(
            spec.regions.len() == count,
            "trial {t}: placed {} regions",
            spec.regions.len()
        );
        let attacked = apply_tamper(&res.watermarked, &spec, roi).map_err(|e| e.to_string())?;
        ensure!(
            !attacked.ground_truth_blocks.is_empty(),
            "trial {t}: tamper changed no average"
        );

        let (rec, rep) = recover(&attacked.image, "recovery", 17).map_err(|e| e.to_string())?;
        ensure!(!rep.authentic, "trial {t}: tamper not detected");
        ensure!(
            rep.tampered_blocks == attacked.ground_truth_blocks,
            "trial {t}: flagged {:?} != truth {:?}",
            rep.tampered_blocks,
            attacked.ground_truth_blocks
        );

        let map = RegionMap::new(256, 256, roi).unwrap();
        for &(i, fill) in &rec.recovered_blocks {
            let block = map.roi_blocks()[i];
            let want = block.average(&img);
            ensure!(
                fill == want,
                "trial {t}: block {i} filled {fill}, original average {want}"
            );
            ensure!(
                block.coords().all(|(x, y)| rec.image.get(x, y) == fill),
                "trial {t}: block {i} not uniform"
            );
        }

        let orig = img.crop(&roi).unwrap();
        let tampered_psnr = psnr_bytes(&orig, &attacked.image.crop(&roi).unwrap());
        let recovered_psnr = psnr_bytes(&orig, &rec.image.crop(&roi).unwrap());
        ensure!(
            recovered_psnr > tampered_psnr,
            "trial {t}: recovered ROI {recovered_psnr:.2} dB <= tampered {tampered_psnr:.2} dB"
        );
        if rep.payload_state == PayloadState::Corrupt {
            corrupt += 1;
        }
        flagged_total += rep.tampered_blocks.len();
        trials += 1;
    }
    Ok(format!(
        "{trials} trials, {flagged_total} blocks flagged = ground truth, {corrupt} with corrupt payload"
    ))
}

fn ac8_lsb_blind_spot() -> Check {
    let img = synth::generate(Family::Shapes, 256, 256, 8);
    let roi = ROIS[0];
    let res = embed(&img, roi, b"blind spot", "lsb", 17).map_err(|e| e.to_string())?;
    // rows fully covered by the embedded payload prefix
    let rows = res.stats.w_comp_bits / roi.w;
    let payload_rows = Rect::new(roi.x, roi.y, roi.w, rows);
    let mut corrupt = 0;
    for (i, region) in random_regions(payload_rows, 10, 20, 8)
        .into_iter()
        .enumerate()
    {
        let spec = TamperSpec {
            regions: vec![region],
            mode: TamperMode::LsbOnly,
        };
        let attacked = apply_tamper(&res.watermarked, &spec, roi).map_err(|e| e.to_string())?;
        ensure!(
            attacked.ground_truth_blocks.is_empty(),
            "LSB tamper changed a masked average"
        );
        let rep = verify(&attacked.image, "lsb", 17).map_err(|e| e.to_string())?;
        ensure!(
            !rep.authentic,
            "region {i} ({region}): hash mismatch not detected"
        );
        ensure!(
            rep.tampered_blocks.is_empty(),
            "region {i}: blocks flagged {:?}",
            rep.tampered_blocks
        );
        ensure!(
            rep.block_comparisons == roi.area() / 16,
            "region {i}: block scan skipped"
        );
        if rep.payload_state == PayloadState::Corrupt {
            corrupt += 1;
        }
    }
    Ok(format!(
        "10 LSB-only tampers: authentic=false, 0 blocks flagged ({corrupt} with corrupt payload)"
    ))
}

fn ac9_md5_and_wrong_keys() -> Check {
    let suite = [
        ("", "d41d8cd98f00b204e9800998ecf8427e"),
        ("a", "0cc175b9c0f1b6a831c399e269772661"),
        ("abc", "900150983cd24fb0d6963f7d28e17f72"),
        ("message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
        (
            "abcdefghijklmnopqrstuvwxyz",
            "c3fcd3d76192e4007dfb496cca67e13b",
        ),
        (
            "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
            "d174ab98d277d9f5a5611c2c9f419d9f",
        ),
        (
            "12345678901234567890123456789012345678901234567890123456789012345678901234567890",
            "57edf4a22be3c955ac49da2e2107b67a",
        ),
    ];
    for (msg, hex) in suite {
        ensure!(md5(msg.as_bytes()).to_hex() == hex, "md5({msg:?})");
    }

    let img = synth::generate(Family::Phantom, 256, 256, 9);
    let res = embed(&img, ROIS[0], b"", "the-right-key", 7).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad_version = 0;
    for _ in 0..1000 {
        let key: String = (0..rng.gen_range(1..16))
            .map(|_| rng.gen_range('a'..='z'))
            .collect();
        if key == "the-right-key" {
            continue;
        }
        if let Err(Error::BadVersion(_)) = extract_header(&res.watermarked, &key) {
            bad_version += 1;
        }
    }
    ensure!(
        bad_version >= 990,
        "only {bad_version}/1000 wrong keys gave BadVersion"
    );
    Ok(format!(
        "RFC 1321 suite ok; BadVersion for {bad_version}/1000 wrong keys"
    ))
}

fn ac10_capacity() -> Check {
    let img = synth::generate(Family::UniformNoise, 256, 256, 10);
    let before = img.clone();
    let epr = synth::random_epr(4096, 10);
    match embed(&img, ROIS[0], &epr, "cap", 7) {
        Err(Error::CapacityExceeded(msg)) => {
            ensure!(img == before, "input modified");
            let plain = embed(&img, ROIS[0], b"", "cap", 7);
            ensure!(
                matches!(plain, Err(Error::CapacityExceeded(_))),
                "random LSB plane alone should overflow: {:?}",
                plain.map(|r| r.stats)
            );
            Ok(msg)
        }
        other => Err(format!(
            "expected CapacityExceeded, got {:?}",
            other.map(|r| r.stats)
        )),
    }
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion {
            id: "AC1",
            name: "RLE example and round trips",
            budget: Duration::from_secs(10),
            run: ac1_rle,
        },
        Criterion {
            id: "AC2",
            name: "ROI block counts",
            budget: Duration::from_secs(1),
            run: ac2_block_counts,
        },
        Criterion {
            id: "AC3",
            name: "block mapping is a bijection",
            budget: Duration::from_secs(30),
            run: ac3_bijection,
        },
        Criterion {
            id: "AC4",
            name: "distortion bound",
            budget: Duration::from_secs(60),
            run: ac4_distortion,
        },
        Criterion {
            id: "AC5",
            name: "reversibility",
            budget: Duration::from_secs(60),
            run: ac5_reversibility,
        },
        Criterion {
            id: "AC6",
            name: "authentic fast path",
            budget: Duration::from_secs(10),
            run: ac6_fast_path,
        },
        Criterion {
            id: "AC7",
            name: "tamper localization and recovery",
            budget: Duration::from_secs(120),
            run: ac7_localization_recovery,
        },
        Criterion {
            id: "AC8",
            name: "LSB-only blind spot",
            budget: Duration::from_secs(10),
            run: ac8_lsb_blind_spot,
        },
        Criterion {
            id: "AC9",
            name: "MD5 vectors and wrong-key header",
            budget: Duration::from_secs(10),
            run: ac9_md5_and_wrong_keys,
        },
        Criterion {
            id: "AC10",
            name: "capacity overflow",
            budget: Duration::from_secs(10),
            run: ac10_capacity,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.budget => {
                Err(format!("{detail}; took {elapsed:.2?} > {:?}", c.budget))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!(
                "PASS {:<5} {:<34} {:>9.2?}  {detail}",
                c.id, c.name, elapsed
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL {:<5} {:<34} {:>9.2?}  {why}", c.id, c.name, elapsed);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
