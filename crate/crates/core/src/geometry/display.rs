//! Display module catalog.

use serde::{Deserialize, Serialize};

/// Default number of LEDs on a stick module.
pub const DEFAULT_STICK_LEDS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisplayKind {
    /// 3.1" square LCD, 720x720 at 60 Hz.
    Lcd31,
    /// 2.9" square LCD projecting onto a semi-reflective foil, 1440x1440 at 120 Hz.
    LcdSeeThrough29,
    /// Monochrome transparent 128x64 OLED.
    Oled128x64,
    /// Row of RGB LEDs.
    LedStick { leds: u32 },
    /// 13x9 RGB LED matrix.
    LedMatrix13x9,
}

impl DisplayKind {
    pub fn is_led_device(self) -> bool {
        matches!(
            self,
            DisplayKind::Oled128x64 | DisplayKind::LedStick { .. } | DisplayKind::LedMatrix13x9
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            DisplayKind::Lcd31 => "lcd31",
            DisplayKind::LcdSeeThrough29 => "lcd-see-through29",
            DisplayKind::Oled128x64 => "oled128x64",
            DisplayKind::LedStick { .. } => "led-stick",
            DisplayKind::LedMatrix13x9 => "led-matrix13x9",
        }
    }
}

/// Physical and pixel description of a display module.
///
/// Always built from the catalog through [`DisplaySpec::of`], so dimensions and
/// resolution cannot drift from the kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplaySpec {
    pub kind: DisplayKind,
    pub width_mm: f64,
    pub height_mm: f64,
    pub res_x: u32,
    pub res_y: u32,
    pub refresh_hz: f64,
    pub see_through: bool,
    pub monochrome: bool,
}

impl DisplaySpec {
    pub fn of(kind: DisplayKind) -> Self {
        let (width_mm, height_mm, res_x, res_y, refresh_hz, see_through, monochrome) = match kind {
            DisplayKind::Lcd31 => (66.0, 66.0, 720, 720, 60.0, false, false),
            // 2.9" diagonal square panel.
            DisplayKind::LcdSeeThrough29 => (52.0, 52.0, 1440, 1440, 120.0, true, false),
            DisplayKind::Oled128x64 => (42.0, 27.16, 128, 64, 60.0, true, true),
            DisplayKind::LedStick { leds } => (91.44, 25.4, leds.max(1), 1, 30.0, false, false),
            DisplayKind::LedMatrix13x9 => (51.0, 39.0, 13, 9, 30.0, false, false),
        };
        DisplaySpec {
            kind,
            width_mm,
            height_mm,
            res_x,
            res_y,
            refresh_hz,
            see_through,
            monochrome,
        }
    }

    pub fn lcd31() -> Self {
        Self::of(DisplayKind::Lcd31)
    }

    pub fn width_m(&self) -> f64 {
        self.width_mm * 1e-3
    }

    pub fn height_m(&self) -> f64 {
        self.height_mm * 1e-3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        let lcd = DisplaySpec::lcd31();
        assert_eq!((lcd.res_x, lcd.res_y), (720, 720));
        assert_eq!(lcd.refresh_hz, 60.0);
        assert_eq!((lcd.width_mm, lcd.height_mm), (66.0, 66.0));

        let st = DisplaySpec::of(DisplayKind::LcdSeeThrough29);
        assert_eq!((st.res_x, st.res_y, st.refresh_hz), (1440, 1440, 120.0));
        assert!(st.see_through);

        let oled = DisplaySpec::of(DisplayKind::Oled128x64);
        assert_eq!((oled.res_x, oled.res_y), (128, 64));
        assert_eq!((oled.width_mm, oled.height_mm), (42.0, 27.16));

        let stick = DisplaySpec::of(DisplayKind::LedStick { leds: 10 });
        assert_eq!((stick.res_x, stick.res_y), (10, 1));
        assert_eq!((stick.width_mm, stick.height_mm), (91.44, 25.4));

        let matrix = DisplaySpec::of(DisplayKind::LedMatrix13x9);
        assert_eq!((matrix.res_x, matrix.res_y), (13, 9));
        assert_eq!((matrix.width_mm, matrix.height_mm), (51.0, 39.0));
    }

    #[test]
    fn stick_never_zero_resolution() {
        let stick = DisplaySpec::of(DisplayKind::LedStick { leds: 0 });
        assert_eq!(stick.res_x, 1);
    }
}
