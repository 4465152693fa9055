Runnable r = () -> System.out.println("hi");
Function<String, Integer> f = Integer::parseInt;
