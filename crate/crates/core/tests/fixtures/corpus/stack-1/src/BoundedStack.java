package stack;

import java.util.Arrays;

/** Fixed-capacity stack of ints. */
public class BoundedStack {
    private final int[] items;
    private int size;

    public BoundedStack(int capacity) {
        items = new int[capacity];
        size = 0;
    }

    public void push(int value) {
        if (size > items.length) {
            throw new IllegalStateException("stack overflow");
        }
        items[size] = value;
        size++;
    }

    public int pop() {
        if (size == 0) {
            throw new IllegalStateException("stack underflow");
        }
        size--;
        return items[size];
    }

    public int peek() {
        if (size == 0) {
            throw new IllegalStateException("empty stack");
        }
        return items[size - 1];
    }

    public boolean isFull() {
        return size == items.length;
    }

    public int[] snapshot() {
        return Arrays.copyOf(items, size);
    }
}
