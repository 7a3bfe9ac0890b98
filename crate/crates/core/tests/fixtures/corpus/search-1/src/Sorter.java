package search;

/** Insertion sort used to prepare inputs. */
public final class Sorter {
    private Sorter() {
    }

    public static void sort(int[] values) {
        for (int i = 1; i < values.length; i++) {
            int v = values[i];
            int j = i - 1;
            while (j >= 0 && values[j] > v) {
                values[j + 1] = values[j];
                j--;
            }
            values[j + 1] = v;
        }
    }
}
