//! RGB previews of hyperspectral cubes.
//!
//! Each pixel's spectrum is integrated against the CIE 1931 2° color-matching
//! functions at the band wavelengths, normalized so that a flat unit spectrum
//! has `Y = 1`, adapted from the equal-energy white to D65 by XYZ scaling,
//! converted to linear sRGB, clipped and gamma encoded.

use std::path::Path;

use snapcs_core::HsiCube;

use crate::error::{Error, Result};

const CMF_START_NM: f64 = 380.0;
const CMF_END_NM: f64 = 780.0;
const CMF_STEP_NM: f64 = 5.0;

/// CIE 1931 2° standard observer `[x̄, ȳ, z̄]`, 380–780 nm in 5 nm steps.
#[rustfmt::skip]
const CMF: [[f64; 3]; 81] = [
    [0.001368, 3.9e-05, 0.006450001], // 380
    [0.002236, 6.4e-05, 0.01054999], // 385
    [0.004243, 0.00012, 0.02005001], // 390
    [0.00765, 0.000217, 0.03621], // 395
    [0.01431, 0.000396, 0.06785001], // 400
    [0.02319, 0.00064, 0.1102], // 405
    [0.04351, 0.00121, 0.2074], // 410
    [0.07763, 0.00218, 0.3713], // 415
    [0.13438, 0.004, 0.6456], // 420
    [0.21477, 0.0073, 1.0390501], // 425
    [0.2839, 0.0116, 1.3856], // 430
    [0.3285, 0.01684, 1.62296], // 435
    [0.34828, 0.023, 1.74706], // 440
    [0.34806, 0.0298, 1.7826], // 445
    [0.3362, 0.038, 1.77211], // 450
    [0.3187, 0.048, 1.7441], // 455
    [0.2908, 0.06, 1.6692], // 460
    [0.2511, 0.0739, 1.5281], // 465
    [0.19536, 0.09098, 1.28764], // 470
    [0.1421, 0.1126, 1.0419], // 475
    [0.09564, 0.13902, 0.8129501], // 480
    [0.05795001, 0.1693, 0.6162], // 485
    [0.03201, 0.20802, 0.46518], // 490
    [0.0147, 0.2586, 0.3533], // 495
    [0.0049, 0.323, 0.272], // 500
    [0.0024, 0.4073, 0.2123], // 505
    [0.0093, 0.503, 0.1582], // 510
    [0.0291, 0.6082, 0.1117], // 515
    [0.06327, 0.71, 0.07824999], // 520
    [0.1096, 0.7932, 0.05725001], // 525
    [0.1655, 0.862, 0.04216], // 530
    [0.2257499, 0.9148501, 0.02984], // 535
    [0.2904, 0.954, 0.0203], // 540
    [0.3597, 0.9803, 0.0134], // 545
    [0.4334499, 0.9949501, 0.008749999], // 550
    [0.5120501, 1.0, 0.005749999], // 555
    [0.5945, 0.995, 0.0039], // 560
    [0.6784, 0.9786, 0.002749999], // 565
    [0.7621, 0.952, 0.0021], // 570
    [0.8425, 0.9154, 0.0018], // 575
    [0.9163, 0.87, 0.001650001], // 580
    [0.9786, 0.8163, 0.0014], // 585
    [1.0263, 0.757, 0.0011], // 590
    [1.0567, 0.6949, 0.001], // 595
    [1.0622, 0.631, 0.0008], // 600
    [1.0456, 0.5668, 0.0006], // 605
    [1.0026, 0.503, 0.00034], // 610
    [0.9384, 0.4412, 0.00024], // 615
    [0.8544499, 0.381, 0.00019], // 620
    [0.7514, 0.321, 0.0001], // 625
    [0.6424, 0.265, 4.999999e-05], // 630
    [0.5419, 0.217, 3e-05], // 635
    [0.4479, 0.175, 2e-05], // 640
    [0.3608, 0.1382, 1e-05], // 645
    [0.2835, 0.107, 0.0], // 650
    [0.2187, 0.0816, 0.0], // 655
    [0.1649, 0.061, 0.0], // 660
    [0.1212, 0.04458, 0.0], // 665
    [0.0874, 0.032, 0.0], // 670
    [0.0636, 0.0232, 0.0], // 675
    [0.04677, 0.017, 0.0], // 680
    [0.0329, 0.01192, 0.0], // 685
    [0.0227, 0.00821, 0.0], // 690
    [0.01584, 0.005723, 0.0], // 695
    [0.01135916, 0.004102, 0.0], // 700
    [0.008110916, 0.002929, 0.0], // 705
    [0.005790346, 0.002091, 0.0], // 710
    [0.004109457, 0.001484, 0.0], // 715
    [0.002899327, 0.001047, 0.0], // 720
    [0.00204919, 0.00074, 0.0], // 725
    [0.001439971, 0.00052, 0.0], // 730
    [0.0009999493, 0.0003611, 0.0], // 735
    [0.0006900786, 0.0002492, 0.0], // 740
    [0.0004760213, 0.0001719, 0.0], // 745
    [0.0003323011, 0.00012, 0.0], // 750
    [0.0002348261, 8.48e-05, 0.0], // 755
    [0.0001661505, 6e-05, 0.0], // 760
    [0.000117413, 4.24e-05, 0.0], // 765
    [8.307527e-05, 3e-05, 0.0], // 770
    [5.870652e-05, 2.12e-05, 0.0], // 775
    [4.150994e-05, 1.499e-05, 0.0], // 780
];

const D65_WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

const XYZ_TO_SRGB: [[f64; 3]; 3] = [
    [3.2406, -1.5372, -0.4986],
    [-0.9689, 1.8758, 0.0415],
    [0.0557, -0.2040, 1.0570],
];

/// Linearly interpolated color-matching functions at `nm`.
pub fn cmf(nm: f64) -> Result<[f64; 3]> {
    if !(CMF_START_NM..=CMF_END_NM).contains(&nm) {
        return Err(Error::Usage(format!("wavelength {nm} nm is outside {CMF_START_NM}-{CMF_END_NM} nm")));
    }
    let t = (nm - CMF_START_NM) / CMF_STEP_NM;
    let i = (t.floor() as usize).min(CMF.len() - 2);
    let frac = t - i as f64;
    Ok(core::array::from_fn(|k| CMF[i][k] * (1.0 - frac) + CMF[i + 1][k] * frac))
}

fn gamma_encode(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

/// 8-bit interleaved RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let at = 3 * (row * self.width + col);
        [self.data[at], self.data[at + 1], self.data[at + 2]]
    }

    /// Binary PPM (`P6`) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_ppm()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

/// `start, start + step, …` for `bands` bands.
pub fn band_wavelengths(bands: usize, start: f64, step: f64) -> Vec<f64> {
    (0..bands).map(|b| start + step * b as f64).collect()
}

pub fn rgb_preview(cube: &HsiCube, wavelengths: &[f64]) -> Result<RgbImage> {
    let (rows, cols, bands) = cube.dims();
    if wavelengths.len() != bands {
        return Err(Error::Usage(format!("{} wavelengths given for {bands} bands", wavelengths.len())));
    }
    let weights = wavelengths.iter().map(|&nm| cmf(nm)).collect::<Result<Vec<_>>>()?;
    let y_sum: f64 = weights.iter().map(|w| w[1]).sum();
    if !(y_sum > 0.0) {
        return Err(Error::Usage("band wavelengths carry no luminance".into()));
    }
    let mut data = Vec::with_capacity(rows * cols * 3);
    for i in 0..rows {
        for j in 0..cols {
            let mut xyz = [0.0; 3];
            for (b, w) in weights.iter().enumerate() {
                let v = cube.get(i, j, b);
                for k in 0..3 {
                    xyz[k] += v * w[k];
                }
            }
            for k in 0..3 {
                xyz[k] *= D65_WHITE[k] / y_sum;
            }
            for row in &XYZ_TO_SRGB {
                let lin = row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2];
                data.push((gamma_encode(lin) * 255.0).round() as u8);
            }
        }
    }
    Ok(RgbImage { width: cols, height: rows, data })
}
