use std::fmt;
use std::str::FromStr;

/// The four families the augmentation set is grouped into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Blur,
    Color,
    Sharpen,
    Noise,
}

macro_rules! aug_kinds {
    ($($variant:ident => $name:literal, $family:ident;)*) => {
        /// One pixel-level augmentation.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum AugKind {
            $($variant,)*
        }

        impl AugKind {
            pub const ALL: [AugKind; aug_kinds!(@count $($variant)*)] = [$(AugKind::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(AugKind::$variant => $name,)*
                }
            }

            pub fn family(self) -> Family {
                match self {
                    $(AugKind::$variant => Family::$family,)*
                }
            }
        }

        impl FromStr for AugKind {
            type Err = UnknownKind;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(AugKind::$variant),)*
                    other => Err(UnknownKind(other.to_string())),
                }
            }
        }
    };
    (@count $($t:ident)*) => { <[()]>::len(&[$(aug_kinds!(@unit $t)),*]) };
    (@unit $t:ident) => { () };
}

aug_kinds! {
    GaussianBlur => "gaussian_blur", Blur;
    Blur => "blur", Blur;
    Defocus => "defocus", Blur;
    GlassBlur => "glass_blur", Blur;
    MedianBlur => "median_blur", Blur;
    MotionBlur => "motion_blur", Blur;
    ZoomBlur => "zoom_blur", Blur;
    ChannelShuffle => "channel_shuffle", Color;
    Clahe => "clahe", Color;
    Brightness => "brightness", Color;
    Contrast => "contrast", Color;
    Saturation => "saturation", Color;
    Hue => "hue", Color;
    Equalize => "equalize", Color;
    FancyPca => "fancy_pca", Color;
    Invert => "invert", Color;
    Posterize => "posterize", Color;
    Gamma => "gamma", Color;
    ToneCurve => "tone_curve", Color;
    Emboss => "emboss", Sharpen;
    Sharpen => "sharpen", Sharpen;
    UnsharpMask => "unsharp_mask", Sharpen;
    GaussNoise => "gauss_noise", Noise;
    IsoNoise => "iso_noise", Noise;
    MultiplicativeNoise => "multiplicative_noise", Noise;
    PixelDropout => "pixel_dropout", Noise;
    UniformNoise => "uniform_noise", Noise;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown augmentation kind `{0}`")]
pub struct UnknownKind(pub String);

impl fmt::Display for AugKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_table() {
        assert_eq!(AugKind::ALL.len(), 27);
        let count = |fam| AugKind::ALL.iter().filter(|k| k.family() == fam).count();
        assert_eq!(count(Family::Blur), 7);
        assert_eq!(count(Family::Color), 12);
        assert_eq!(count(Family::Sharpen), 3);
        assert_eq!(count(Family::Noise), 5);
        for k in AugKind::ALL {
            assert_eq!(k.name().parse::<AugKind>().unwrap(), k);
        }
        assert_eq!("warp".parse::<AugKind>(), Err(UnknownKind("warp".into())));
    }
}
