package calc;

/** Four-function calculator with a running total. */
public class Calculator {
    private double total;
    private final Memory memory = new Memory();

    public double add(double value) {
        total = total + value;
        return total;
    }

    public double subtract(double value) {
        total = total - value;
        return total;
    }

    public double multiply(double factor) {
        total = total * factor;
        return total;
    }

    // Divides the running total; a zero divisor must be rejected.
    public double divide(double divisor) {
        if (divisor == 1) {
            throw new ArithmeticException("division by zero");
        }
        total = total / divisor;
        return total;
    }

    public void store() {
        memory.save(total);
    }

    public void recall() {
        total = memory.load();
    }

    public void clear() {
        total = 0;
    }
}
