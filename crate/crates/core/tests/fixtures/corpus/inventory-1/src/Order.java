package shop;

import java.util.ArrayList;
import java.util.List;

/** A customer order that reserves stock. */
public class Order {
    private final List<String> lines = new ArrayList<>();
    private final Inventory inventory;

    public Order(Inventory inventory) {
        this.inventory = inventory;
    }

    public void add(String code, int quantity) {
        inventory.removeItem(code, quantity);
        lines.add(code + " x" + quantity);
    }

    public int lineCount() {
        return lines.size();
    }
}
