package matrix;

/** Dense row-major matrix of doubles. */
public class Matrix {
    private final int rows;
    private final int cols;
    private final double[][] data;

    public Matrix(int rows, int cols) {
        this.rows = rows;
        this.cols = cols;
        this.data = new double[rows][cols];
    }

    public double get(int r, int c) {
        return data[r][c];
    }

    public void set(int r, int c, double v) {
        data[r][c] = v;
    }

    public Matrix transpose() {
        Matrix t = new Matrix(cols, rows);
        for (int r = 0; r < rows; r++) {
            for (int c = 0; c < cols; c++) {
                t.set(r, c, data[r][c]);
            }
        }
        return t;
    }

    public Matrix multiply(Matrix other) {
        Matrix out = new Matrix(rows, other.cols);
        for (int r = 0; r < rows; r++) {
            for (int c = 0; c < other.cols; c++) {
                double sum = 0;
                for (int k = 0; k < cols; k++) {
                    sum += data[r][k] * other.data[k][c];
                }
                out.set(r, c, sum);
            }
        }
        return out;
    }
}
