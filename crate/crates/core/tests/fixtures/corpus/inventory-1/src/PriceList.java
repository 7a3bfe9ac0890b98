package shop;

import java.util.HashMap;
import java.util.Map;

/** Unit prices in cents. */
public class PriceList {
    private final Map<String, Long> prices = new HashMap<>();

    public void setPrice(String code, long cents) {
        prices.put(code, cents);
    }

    public long total(String code, int quantity) {
        Long unit = prices.get(code);
        if (unit == null) {
            throw new IllegalArgumentException("unknown product " + code);
        }
        return unit * quantity;
    }
}
