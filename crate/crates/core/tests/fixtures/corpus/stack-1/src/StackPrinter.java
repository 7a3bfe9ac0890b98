package stack;

/** Renders a stack for debugging output. */
public class StackPrinter {
    public String render(BoundedStack stack) {
        StringBuilder sb = new StringBuilder("[");
        int[] values = stack.snapshot();
        for (int i = 0; i < values.length; i++) {
            if (i > 0) {
                sb.append(", ");
            }
            sb.append(values[i]);
        }
        return sb.append("]").toString();
    }
}
