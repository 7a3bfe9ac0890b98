package range;

/** Parses and prints ranges such as "3..7". */
public class RangeFormat {
    public Range parse(String text) {
        String[] parts = text.split("\\.\\.");
        int low = Integer.parseInt(parts[0].trim());
        int high = Integer.parseInt(parts[1].trim());
        return new Range(low, high);
    }

    public String print(int low, int high) {
        return low + ".." + high;
    }
}
