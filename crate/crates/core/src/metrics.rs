//! PSNR and mean SSIM.
//!
//! SSIM uses the usual reference parameters: 11x11 Gaussian window with
//! sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255, evaluated only where the window
//! fits entirely inside the image.

use crate::error::{Error, Result};
use crate::image::GrayImage;

const PEAK: f64 = 255.0;
const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
const C2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityScore {
    /// Decibels; `f64::INFINITY` for identical inputs.
    pub psnr_db: f64,
    pub mssim: f64,
}

fn same_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

pub fn mse_bytes(a: &[u8], b: &[u8]) -> f64 {
    assert_eq!(a.len(), b.len(), "mse of unequal lengths");
    if a.is_empty() {
        return 0.0;
    }
    let sum: u64 = a
        .iter()
        .zip(b)
        .map(|(&p, &q)| {
            let d = p as i64 - q as i64;
            (d * d) as u64
        })
        .sum();
    sum as f64 / a.len() as f64
}

/// PSNR over two equally long pixel slices, e.g. ROI crops.
pub fn psnr_bytes(a: &[u8], b: &[u8]) -> f64 {
    let mse = mse_bytes(a, b);
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    same_dims(a, b)?;
    Ok(psnr_bytes(a.pixels(), b.pixels()))
}

fn gaussian_kernel() -> [f64; WINDOW] {
    let mut k = [0.0; WINDOW];
    let c = (WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-(d * d) / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable 'valid' filtering: output is `(w - 10) x (h - 10)`.
fn filter_valid(plane: &[f64], w: usize, h: usize, k: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = k.iter().zip(&row[x..x + WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * horiz[(y + i) * ow + x])
                .sum();
        }
    }
    out
}

/// Mean of the local SSIM map.
pub fn mssim(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    same_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < WINDOW || h < WINDOW {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min: WINDOW,
        });
    }

    let k = gaussian_kernel();
    let x: Vec<f64> = a.pixels().iter().map(|&p| p as f64).collect();
    let y: Vec<f64> = b.pixels().iter().map(|&p| p as f64).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(&x, w, h, &k);
    let mu_y = filter_valid(&y, w, h, &k);
    let e_xx = filter_valid(&xx, w, h, &k);
    let e_yy = filter_valid(&yy, w, h, &k);
    let e_xy = filter_valid(&xy, w, h, &k);

    let n = mu_x.len();
    let mut total = 0.0;
    for i in 0..n {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let mxy = mx * my;
        let var_x = e_xx[i] - mx * mx;
        let var_y = e_yy[i] - my * my;
        let cov = e_xy[i] - mxy;
        let num = (2.0 * mxy + C1) * (2.0 * cov + C2);
        let den = (mx * mx + my * my + C1) * (var_x + var_y + C2);
        total += num / den;
    }
    Ok(total / n as f64)
}

pub fn quality(a: &GrayImage, b: &GrayImage) -> Result<QualityScore> {
    Ok(QualityScore {
        psnr_db: psnr(a, b)?,
        mssim: mssim(a, b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| ((x * 37 + y * 11 + (x * y) % 17) % 256) as u8).unwrap()
    }

    #[test]
    fn identical_is_infinite_and_one() {
        let a = textured(32, 32);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert_eq!(mssim(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn off_by_one_everywhere() {
        let a = GrayImage::filled(64, 64, 100).unwrap();
        let b = GrayImage::filled(64, 64, 101).unwrap();
        let expected = 10.0 * (65025.0f64).log10();
        assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-12);
        assert!((psnr(&a, &b).unwrap() - 48.13).abs() < 0.01);
    }

    #[test]
    fn single_full_swing_pixel() {
        let a = GrayImage::filled(256, 256, 0).unwrap();
        let mut b = a.clone();
        b.set(10, 10, 255);
        // MSE = 255^2 / 65536
        let expected = 10.0 * (65536.0f64).log10();
        assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-9);
        assert!((expected - 48.16).abs() < 0.005);
    }

    #[test]
    fn inverted_scores_lower() {
        let a = textured(48, 40);
        let b = GrayImage::from_fn(48, 40, |x, y| 255 - a.get(x, y)).unwrap();
        assert!(mssim(&a, &b).unwrap() < 1.0);
    }

    #[test]
    fn symmetric() {
        let a = textured(40, 40);
        let b = GrayImage::from_fn(40, 40, |x, y| a.get(x, y) ^ ((x + y) % 2) as u8).unwrap();
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        assert_eq!(mssim(&a, &b).unwrap(), mssim(&b, &a).unwrap());
    }

    #[test]
    fn errors() {
        let a = GrayImage::filled(16, 16, 0).unwrap();
        let b = GrayImage::filled(17, 16, 0).unwrap();
        assert!(matches!(psnr(&a, &b), Err(Error::DimensionMismatch(..))));
        assert!(matches!(mssim(&a, &b), Err(Error::DimensionMismatch(..))));
    }

    #[test]
    fn psnr_decreases_with_mse() {
        let a = [10u8; 100];
        let mut last = f64::INFINITY;
        for d in 1..20u8 {
            let b = [10 + d; 100];
            let p = psnr_bytes(&a, &b);
            assert!(p < last);
            last = p;
        }
    }
}
