public interface Marker {}
enum Color { RED, GREEN, BLUE }
