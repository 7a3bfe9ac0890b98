package temp;

/** Converts between Celsius, Fahrenheit and Kelvin. */
public class TemperatureConverter {
    private static final double ABSOLUTE_ZERO_C = -273.15;

    public double celsiusToFahrenheit(double celsius) {
        return celsius * 9 / 5 + 32;
    }

    public double fahrenheitToCelsius(double fahrenheit) {
        return fahrenheit - 32 * 5 / 9;
    }

    public double celsiusToKelvin(double celsius) {
        if (celsius < ABSOLUTE_ZERO_C) {
            throw new IllegalArgumentException("below absolute zero");
        }
        return celsius - ABSOLUTE_ZERO_C;
    }
}
