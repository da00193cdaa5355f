// Hand-written unit tests, one per block. Every block parses without
// opaque statements and carries at least one oracle in the test grammar.
// Block header: //== <id> <category>

//== stack_pop boolean-true
@Test
public void testPop() {
  Stack s = new Stack();
  s.push(1);
  s.pop();
  assertTrue(s.isEmpty());
}

//== stack_pop_exceptional exception-unspecified
@Test
public void testPopEmpty() {
  try {
    Stack s = new Stack();
    s.pop();
    Assert.fail();
  } catch (Exception e) {
  }
}

//== create_number exception-typed
public void testStack() {
  try {
    NumberUtils.createNumber("0XT");
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, NumberFormatException);
  }
}

//== keyed_values_regression equals-const
public void testKeyedValues() {
  KeyedValues kv = new KeyedValues();
  Short short0 = new Short((short) 2);
  kv.insertValue(0, short0, 2);
  kv.removeValue(0);
  int int0 = kv.itemCount();
  assertEquals(1, int0);
}

//== send_message equals-var
public void testSendMessage() {
  String msg = "foo";
  Unit.sendMessage(msg);
  assertEquals(msg, Unit.getLastMessage());
}

//== send_message_reversed equals-reversed
public void testSendMessageReversed() {
  String msg = "bar";
  Unit.sendMessage(msg);
  assertEquals(Unit.getLastMessage(), msg);
}

//== boolean_status boolean-true
public void testStatusAfterCall() {
  Unit.methodcall(7);
  assertTrue(Unit.getStatus());
}

//== process_input_not_null notnull
public void testProcessInput() {
  Processor processor = new Processor();
  assertNotNull(processor.processInput("input"));
}

//== process_input_null null
public void testProcessInvalidInput() {
  Processor processor = new Processor();
  assertNull(processor.processInput(null));
}

//== list_size equals-const
public void testListSize() {
  ArrayList<String> list = new ArrayList<String>();
  list.add("a");
  list.add("b");
  assertEquals(2, list.size());
}

//== list_empty boolean-false
public void testListNotEmpty() {
  List<Integer> list = new ArrayList<>();
  list.add(3);
  assertFalse(list.isEmpty());
}

//== list_get_var equals-var
public void testListGet() {
  Integer value = Integer.valueOf(42);
  List<Integer> list = new ArrayList<>();
  list.add(value);
  assertEquals(value, list.get(0));
}

//== map_get_null null
public void testMapMissingKey() {
  HashMap<String, Integer> map = new HashMap<String, Integer>();
  map.put("one", 1);
  assertNull(map.get("two"));
}

//== map_contains boolean-true
public void testMapContainsKey() {
  Map<String, String> map = new HashMap<>();
  map.put("k", "v");
  assertTrue(map.containsKey("k"));
}

//== map_remove_typed_exception exception-typed
public void testUnmodifiablePut() {
  Map<String, String> map = Collections.emptyMap();
  try {
    map.put("k", "v");
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, UnsupportedOperationException);
  }
}

//== iterator_next_catch_type exception-typed
public void testIteratorExhausted() {
  Iterator<String> it = new ArrayList<String>().iterator();
  try {
    it.next();
    fail();
  } catch (NoSuchElementException e) {
  }
}

//== string_builder_length equals-const
public void testStringBuilderLength() {
  StringBuilder sb = new StringBuilder();
  sb.append("abc");
  int int0 = sb.length();
  assertEquals(3, int0);
}

//== string_builder_to_string equals-var
public void testStringBuilderToString() {
  String text = "hello";
  StringBuilder sb = new StringBuilder(text);
  String string0 = sb.toString();
  assertEquals(text, string0);
}

//== range_contains boolean-true
public void testRangeContains() {
  Range range = new Range(0.0, 10.0);
  boolean boolean0 = range.contains(5.0);
  assertTrue(boolean0);
}

//== range_excludes boolean-false
public void testRangeExcludes() {
  Range range = new Range(0.0, 10.0);
  boolean boolean0 = range.contains(11.5);
  assertFalse(boolean0);
}

//== range_length equals-const
public void testRangeLength() {
  Range range = new Range(2.0, 6.0);
  double double0 = range.getLength();
  assertEquals(4.0, double0);
}

//== fraction_reduce notnull
public void testFractionReduce() {
  Fraction fraction0 = Fraction.getFraction(2, 4);
  Fraction fraction1 = fraction0.reduce();
  assertNotNull(fraction1);
}

//== fraction_zero_denominator exception-typed
public void testFractionZeroDenominator() {
  try {
    Fraction.getFraction(1, 0);
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, ArithmeticException);
  }
}

//== queue_poll_null null
public void testQueuePollEmpty() {
  LinkedList<String> queue = new LinkedList<String>();
  String string0 = queue.poll();
  assertNull(string0);
}

//== queue_peek equals-var
public void testQueuePeek() {
  String head = "first";
  LinkedList<String> queue = new LinkedList<String>();
  queue.offer(head);
  queue.offer("second");
  String string0 = queue.peek();
  assertEquals(head, string0);
}

//== string_utils_is_empty boolean-true
public void testIsEmpty() {
  boolean boolean0 = StringUtils.isEmpty("");
  assertTrue(boolean0);
}

//== string_utils_is_blank boolean-false
public void testIsBlank() {
  boolean boolean0 = StringUtils.isBlank("x");
  assertFalse(boolean0);
}

//== string_utils_reverse equals-const
public void testReverse() {
  String string0 = StringUtils.reverse("abc");
  assertEquals("cba", string0);
}

//== string_utils_substring_null null
public void testSubstringNull() {
  String string0 = StringUtils.substring((String) null, 1);
  assertNull(string0);
}

//== char_at equals-const
public void testCharAt() {
  String text = "xyz";
  char char0 = text.charAt(1);
  assertEquals('y', char0);
}

//== long_parse equals-const
public void testParseLong() {
  long long0 = Long.parseLong("12");
  assertEquals(12L, long0);
}

//== float_value equals-const
public void testFloatValue() {
  Float float0 = new Float(1.5F);
  float float1 = float0.floatValue();
  assertEquals(1.5F, float1);
}

//== index_out_of_bounds exception-typed
public void testGetNegativeIndex() {
  ArrayList<String> list = new ArrayList<String>();
  try {
    list.get(-1);
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, IndexOutOfBoundsException);
  }
}

//== null_pointer_unspecified exception-unspecified
public void testNullArgument() {
  Validator validator = new Validator();
  try {
    validator.validate(null);
    fail();
  } catch (Exception e) {
  }
}

//== multi_not_null_equals multi
public void testMultipleAssertions() {
  Account a = new Account("alice");
  assertNotNull(a);
  int b = a.getBalance();
  assertEquals(0, b);
}

//== multi_true_false multi
public void testToggle() {
  Switch sw = new Switch();
  sw.toggle();
  assertTrue(sw.isOn());
  sw.toggle();
  assertFalse(sw.isOn());
}

//== multi_three multi
public void testCounter() {
  Counter counter = new Counter();
  counter.increment();
  int int0 = counter.get();
  assertEquals(1, int0);
  counter.reset();
  int int1 = counter.get();
  assertEquals(0, int1);
  assertNotNull(counter.toString());
}

//== qualified_assert boolean-true
public void testQualifiedAssert() {
  Bag bag = new Bag();
  bag.add("x");
  Assert.assertTrue(bag.contains("x"));
}

//== qualified_fail exception-unspecified
public void testQualifiedFail() {
  Bag bag = new Bag();
  try {
    bag.remove("missing");
    org.junit.Assert.fail();
  } catch (Exception e) {
  }
}

//== field_access_equals equals-const
public void testFieldAccess() {
  Point p = new Point(3, 4);
  int x = p.x;
  assertEquals(3, x);
}

//== cast_argument equals-var
public void testCastArgument() {
  Object value = (Object) "text";
  Holder holder = new Holder(value);
  Object object0 = holder.get();
  assertEquals(value, object0);
}

//== final_local boolean-true
public void testFinalLocal() {
  final Set<String> seen = new HashSet<String>();
  seen.add("a");
  boolean boolean0 = seen.contains("a");
  assertTrue(boolean0);
}

//== assign_after_decl equals-const
public void testAssignAfterDeclaration() {
  KeyedValues kv;
  kv = new KeyedValues();
  kv.addValue("k", 5);
  int int0;
  int0 = kv.getItemCount();
  assertEquals(1, int0);
}

//== throws_clause notnull
public void testThrowsClause() throws Exception {
  Reader reader = new Reader("in.txt");
  String line = reader.readLine();
  assertNotNull(line);
}

//== chained_call equals-const
public void testChainedCall() {
  Builder builder = new Builder();
  String string0 = builder.withName("n").withAge(3).build().getName();
  assertEquals("n", string0);
}

//== new_in_arg boolean-false
public void testNewInArgument() {
  Registry registry = new Registry();
  registry.register(new Entry("e1"));
  boolean boolean0 = registry.isEmpty();
  assertFalse(boolean0);
}

//== exception_with_pre_statements exception-typed
public void testPreStatementsBeforeTry() {
  Stack stack = new Stack();
  stack.push("x");
  stack.pop();
  try {
    stack.pop();
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, EmptyStackException);
  }
}

//== exception_qualified_type exception-typed
public void testQualifiedExceptionType() {
  Parser parser = new Parser();
  try {
    parser.parse("{");
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, java.text.ParseException);
  }
}

//== equals_boolean_const equals-const
public void testEqualsBooleanConstant() {
  Flag flag = new Flag(true);
  boolean boolean0 = flag.get();
  assertEquals(true, boolean0);
}

//== equals_null_const equals-const
public void testEqualsNullConstant() {
  Cache cache = new Cache();
  Object object0 = cache.lookup("absent");
  assertEquals(null, object0);
}

//== negative_literal equals-const
public void testNegativeLiteral() {
  Finder finder = new Finder();
  int int0 = finder.indexOf("zzz");
  assertEquals(-1, int0);
}

//== hex_literal equals-const
public void testHexLiteral() {
  Decoder decoder = new Decoder();
  int int0 = decoder.decode("0x1F");
  assertEquals(0x1F, int0);
}

//== string_escape equals-const
public void testStringEscape() {
  Quoter quoter = new Quoter();
  String string0 = quoter.quote("a");
  assertEquals("\"a\"", string0);
}

//== static_receiver_not_null notnull
public void testStaticFactory() {
  Locale locale0 = Locale.getDefault();
  assertNotNull(locale0);
}

//== boxed_integer equals-const
public void testBoxedInteger() {
  Integer integer0 = Integer.valueOf(7);
  assertEquals(7, integer0);
}

//== generic_nested notnull
public void testNestedGenerics() {
  Map<String, List<Integer>> index = new HashMap<String, List<Integer>>();
  List<Integer> list0 = index.getOrDefault("k", new ArrayList<Integer>());
  assertNotNull(list0);
}
