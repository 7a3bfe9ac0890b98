package csv;

import java.util.List;

/** Joins fields into a CSV line, quoting where needed. */
public class CsvWriter {
    public String write(List<String> fields) {
        StringBuilder out = new StringBuilder();
        for (int i = 0; i < fields.size(); i++) {
            if (i > 0) {
                out.append(',');
            }
            String f = fields.get(i);
            if (f.indexOf(',') >= 0) {
                out.append('"').append(f).append('"');
            } else {
                out.append(f);
            }
        }
        return out.toString();
    }
}
