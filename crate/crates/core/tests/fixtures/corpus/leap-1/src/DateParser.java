package date;

/** Parses ISO dates of the form yyyy-mm-dd. */
public class DateParser {
    public int[] parse(String text) {
        String[] fields = text.split("-");
        if (fields.length != 3) {
            throw new IllegalArgumentException("expected yyyy-mm-dd: " + text);
        }
        int year = Integer.parseInt(fields[0]);
        int month = Integer.parseInt(fields[1]);
        int day = Integer.parseInt(fields[2]);
        if (day > Calendar.daysInMonth(year, month)) {
            throw new IllegalArgumentException("day out of range: " + text);
        }
        return new int[] {year, month, day};
    }
}
