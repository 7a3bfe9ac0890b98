package range;

/** Closed integer interval [low, high]. */
public final class Range {
    private final int low;
    private final int high;

    public Range(int low, int high) {
        if (low > high) {
            throw new IllegalArgumentException("low > high");
        }
        this.low = low;
        this.high = high;
    }

    public boolean contains(int value) {
        return value >= low && value < high;
    }

    public int length() {
        return high - low + 1;
    }

    public boolean overlaps(Range other) {
        return low <= other.high && other.low <= high;
    }

    public Range intersect(Range other) {
        int lo = Math.max(low, other.low);
        int hi = Math.min(high, other.high);
        return new Range(lo, hi);
    }
}
